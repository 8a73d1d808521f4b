#pragma once

// Finite atomic complex measures on a one-dimensional lattice {j * unit : j in Z}.
//
// Only nonzero weights are stored, sorted by index. Convolution is exact index
// addition, so any two measures on the same tagged unit combine without
// location error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "symaudit/core.hpp"

namespace symaudit {

/// Weights with modulus below this are dropped. Only true zeros and
/// denormal debris fall under it.
inline constexpr double kPruneThreshold = 1e-300;

/// Upper bound on the number of series terms exp_measure may use.
inline constexpr int kExpTermCap = 512;

class LatticeComplexMeasure {
 public:
  using Atom = std::pair<std::int64_t, complex>;

  LatticeComplexMeasure() = default;
  explicit LatticeComplexMeasure(LatticeUnit unit) : unit_(std::move(unit)) {}

  /// Duplicate indices are summed; the result is pruned.
  LatticeComplexMeasure(LatticeUnit unit, std::vector<Atom> atoms) : unit_(std::move(unit)) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.first < b.first; });
    for (auto& [j, w] : atoms) {
      if (!atoms_.empty() && atoms_.back().first == j)
        atoms_.back().second += w;
      else
        atoms_.emplace_back(j, w);
    }
    prune();
  }

  static LatticeComplexMeasure dirac(LatticeUnit unit, std::int64_t index, complex weight = 1.0) {
    return LatticeComplexMeasure(std::move(unit), {{index, weight}});
  }

  const LatticeUnit& unit() const { return unit_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::int64_t min_index() const { return atoms_.empty() ? 0 : atoms_.front().first; }
  std::int64_t max_index() const { return atoms_.empty() ? 0 : atoms_.back().first; }

  complex weight(std::int64_t index) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), index,
                               [](const Atom& a, std::int64_t j) { return a.first < j; });
    return (it != atoms_.end() && it->first == index) ? it->second : complex{};
  }

  double location(std::int64_t index) const { return static_cast<double>(index) * unit_.value; }

 private:
  void prune() {
    std::erase_if(atoms_, [](const Atom& a) { return std::abs(a.second) < kPruneThreshold; });
  }

  LatticeUnit unit_;
  std::vector<Atom> atoms_;
};

using Measure = LatticeComplexMeasure;

inline void require_same_unit(const Measure& a, const Measure& b) {
  if (a.unit().tag != b.unit().tag || a.unit().value != b.unit().value)
    throw UnitMismatch("lattice units differ: '" + a.unit().tag + "' (" + fmt17(a.unit().value) +
                       ") vs '" + b.unit().tag + "' (" + fmt17(b.unit().value) + ")");
}

inline complex total_mass(const Measure& mu) {
  complex s{};
  for (const auto& [j, w] : mu.atoms()) s += w;
  return s;
}

/// |mu|: for atoms, the modulus of each weight.
inline Measure total_variation(const Measure& mu) {
  std::vector<Measure::Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& [j, w] : mu.atoms()) atoms.emplace_back(j, std::abs(w));
  return Measure(mu.unit(), std::move(atoms));
}

inline double tv_norm(const Measure& mu) {
  CompensatedSum s;
  for (const auto& [j, w] : mu.atoms()) s.add(std::abs(w));
  return s.value();
}

inline Measure add(const Measure& a, const Measure& b) {
  require_same_unit(a, b);
  std::vector<Measure::Atom> atoms(a.atoms().begin(), a.atoms().end());
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return Measure(a.unit(), std::move(atoms));
}

inline Measure scale(complex z, const Measure& mu) {
  std::vector<Measure::Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& [j, w] : mu.atoms()) atoms.emplace_back(j, z * w);
  return Measure(mu.unit(), std::move(atoms));
}

inline Measure subtract(const Measure& a, const Measure& b) { return add(a, scale(-1.0, b)); }

inline Measure convolve(const Measure& a, const Measure& b) {
  require_same_unit(a, b);
  if (a.empty() || b.empty()) return Measure(a.unit());
  const std::int64_t lo = a.min_index() + b.min_index();
  const std::int64_t hi = a.max_index() + b.max_index();
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const auto pairs = static_cast<std::uint64_t>(a.size()) * b.size();
  std::vector<Measure::Atom> out;
  if (span <= 4 * pairs + 1024) {
    std::vector<complex> dense(span);
    for (const auto& [i, x] : a.atoms())
      for (const auto& [j, y] : b.atoms()) dense[static_cast<std::size_t>(i + j - lo)] += x * y;
    out.reserve(span);
    for (std::size_t m = 0; m < dense.size(); ++m)
      if (dense[m] != complex{}) out.emplace_back(lo + static_cast<std::int64_t>(m), dense[m]);
  } else {
    std::map<std::int64_t, complex> acc;
    for (const auto& [i, x] : a.atoms())
      for (const auto& [j, y] : b.atoms()) acc[i + j] += x * y;
    out.assign(acc.begin(), acc.end());
  }
  return Measure(a.unit(), std::move(out));
}

/// Fourier transform sum_j w_j exp(i u j unit).
inline complex fourier(const Measure& mu, double u) {
  CompensatedSum re, im;
  for (const auto& [j, w] : mu.atoms()) {
    const complex z = w * std::polar(1.0, u * mu.location(j));
    re.add(z.real());
    im.add(z.imag());
  }
  return {re.value(), im.value()};
}

/// sum_j w_j (j unit)^p. In one dimension |x|^2 = x^2, so p = 2 is the
/// second absolute moment of the location.
inline complex moment(const Measure& mu, int p) {
  if (p < 0) throw DomainError("moment order must be nonnegative");
  CompensatedSum re, im;
  for (const auto& [j, w] : mu.atoms()) {
    const complex z = w * std::pow(mu.location(j), p);
    re.add(z.real());
    im.add(z.imag());
  }
  return {re.value(), im.value()};
}

struct SeriesOrder {
  int terms = 0;            // highest power M kept
  double tail_bound = 0.0;  // sum_{m > M} r^m / m!
};

/// Smallest M with sum_{m>M} r^m/m! <= tol, using the geometric tail bound
/// r^{M+1}/(M+1)! / (1 - r/(M+2)) once M + 2 > r.
inline SeriesOrder exp_series_order(double r, double tol, int cap = kExpTermCap) {
  if (!(tol > 0.0)) throw DomainError("exp_measure tolerance must be positive");
  if (r <= 0.0) return {0, 0.0};
  double next_term = r;  // r^{M+1}/(M+1)! for M = 0
  for (int m = 0; m <= cap; ++m) {
    if (m + 2 > r) {
      const double bound = next_term / (1.0 - r / (m + 2));
      if (bound <= tol) return {m, bound};
    }
    next_term *= r / (m + 2);
  }
  throw BudgetExceeded("exp_measure needs more than " + std::to_string(cap) +
                       " terms for norm " + fmt17(r) + " at tolerance " + fmt17(tol));
}

struct ExpSeries {
  Measure even;  // sum over even m of mu^{*m}/m!  (cosh part)
  Measure odd;   // sum over odd m                  (sinh part)
  SeriesOrder order;

  Measure value() const { return add(even, odd); }
};

/// Truncated power series of exp, split into its even and odd parts.
inline ExpSeries exp_series(const Measure& mu, double tol, int cap = kExpTermCap) {
  const SeriesOrder order = exp_series_order(tv_norm(mu), tol, cap);
  Measure term = Measure::dirac(mu.unit(), 0);
  std::vector<Measure::Atom> even(term.atoms().begin(), term.atoms().end());
  std::vector<Measure::Atom> odd;
  for (int m = 1; m <= order.terms; ++m) {
    term = scale(1.0 / m, convolve(term, mu));
    auto& dst = (m % 2 == 0) ? even : odd;
    dst.insert(dst.end(), term.atoms().begin(), term.atoms().end());
  }
  return {Measure(mu.unit(), std::move(even)), Measure(mu.unit(), std::move(odd)), order};
}

struct ExpResult {
  Measure measure;
  SeriesOrder order;
};

inline ExpResult exp_measure(const Measure& mu, double tol, int cap = kExpTermCap) {
  ExpSeries s = exp_series(mu, tol, cap);
  return {s.value(), s.order};
}

enum class Symmetry { symmetric, antisymmetric, neither };

inline const char* to_string(Symmetry s) {
  switch (s) {
    case Symmetry::symmetric: return "symmetric";
    case Symmetry::antisymmetric: return "antisymmetric";
    default: return "neither";
  }
}

/// Tolerance is relative to tv_norm(mu). The zero measure is symmetric.
inline Symmetry symmetry_class(const Measure& mu, double tol = 1e-12) {
  const double thr = tol * tv_norm(mu);
  bool sym = true, anti = true;
  for (const auto& [j, w] : mu.atoms()) {
    const complex mirror = mu.weight(-j);
    if (std::abs(w - mirror) > thr) sym = false;
    if (std::abs(w + mirror) > thr) anti = false;
    if (!sym && !anti) break;
  }
  if (sym) return Symmetry::symmetric;
  if (anti) return Symmetry::antisymmetric;
  return Symmetry::neither;
}

/// True when |a_j| <= b_j + tol for every index (b real and nonnegative).
inline bool atomwise_dominated(const Measure& a, const Measure& b, double tol) {
  for (const auto& [j, w] : a.atoms())
    if (std::abs(w) > b.weight(j).real() + tol) return false;
  return true;
}

struct ConvolutionFold {
  Measure measure;
  double second_moment_sum = 0.0;   // sum_n int |v|^2 |mu_n|(dv)
  double tv_product = 1.0;          // prod_n ||mu_n||
  std::vector<std::size_t> uncentred;  // n with |int v |mu_n|(dv)| > tol
};

/// Left fold of convolutions over an already-truncated list, with the
/// centring and second-moment diagnostics that govern whether the infinite
/// convolution of the full sequence exists.
inline ConvolutionFold convolve_sequence(std::span<const Measure> measures, double tol,
                                         LatticeUnit unit_for_empty = {}) {
  ConvolutionFold fold;
  if (measures.empty()) {
    fold.measure = Measure::dirac(std::move(unit_for_empty), 0);
    return fold;
  }
  fold.measure = Measure::dirac(measures.front().unit(), 0);
  for (std::size_t n = 0; n < measures.size(); ++n) {
    const Measure& mu = measures[n];
    fold.measure = convolve(fold.measure, mu);
    const Measure abs_mu = total_variation(mu);
    if (std::abs(moment(abs_mu, 1)) > tol) fold.uncentred.push_back(n);
    fold.second_moment_sum += moment(abs_mu, 2).real();
    fold.tv_product *= tv_norm(mu);
  }
  return fold;
}

}  // namespace symaudit
