#pragma once

// Randomised property sweeps over the measure algebra and the term-measure
// construction. Each sweep reports the worst observed error per property so
// callers can compare against their own tolerances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "symaudit/majorant.hpp"
#include "symaudit/measure.hpp"
#include "symaudit/rng.hpp"

namespace symaudit {

struct PropertyResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;

  bool pass() const { return worst <= tolerance; }
};

struct SweepReport {
  std::vector<PropertyResult> properties;

  bool pass() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.pass(); });
  }
  const PropertyResult& get(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return p;
    throw DomainError("no property named " + name);
  }
};

namespace detail {

class PropertyTable {
 public:
  void declare(const std::string& name, double tol) {
    order_.push_back(name);
    rows_[name] = {name, 0.0, tol, 0};
  }
  void record(const std::string& name, double err) {
    auto& r = rows_.at(name);
    r.worst = std::max(r.worst, std::isnan(err) ? std::numeric_limits<double>::infinity() : err);
    ++r.cases;
  }
  SweepReport report() const {
    SweepReport out;
    for (const auto& n : order_) out.properties.push_back(rows_.at(n));
    return out;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, PropertyResult> rows_;
};

inline double uniform(CounterStream& rng, double lo, double hi) {
  return lo + (hi - lo) * (rng.uniform_open_left() - 0x1p-54);
}

}  // namespace detail

/// 1..max_atoms atoms at indices in [-span, span], weights uniform on the unit
/// square, rescaled to total variation `norm` when norm > 0.
inline Measure random_measure(CounterStream& rng, const LatticeUnit& unit, int max_atoms = 8, int span = 10,
                              double norm = 0.0) {
  const int count = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_atoms));
  std::vector<Measure::Atom> atoms;
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(2 * span + 1)) - span;
    atoms.emplace_back(j, complex{detail::uniform(rng, -1, 1), detail::uniform(rng, -1, 1)});
  }
  Measure mu(unit, std::move(atoms));
  if (norm > 0.0 && !mu.empty()) mu = scale(norm / tv_norm(mu), mu);
  return mu;
}

/// Banach-algebra laws, the norm inequality, the Fourier homomorphism and
/// orthogonal additivity (tolerance `law_tol`, relative to the product of
/// norms); the moment identities of exp (tolerance `exp_tol`, relative to
/// 1 + |expected|) on measures with ||mu|| <= 3; symmetry of |exp(z(d_s - d_-s))|
/// and of exp(z(d_s + d_-s)) (tolerance `law_tol`, relative to the norm).
inline SweepReport measure_algebra_sweep(std::size_t count, std::uint64_t seed, double law_tol = 1e-12,
                                         double exp_tol = 1e-8) {
  const LatticeUnit unit{1.0, "1"};
  detail::PropertyTable tab;
  for (const char* n : {"associativity", "commutativity", "distributivity", "identity", "scalar_homogeneity",
                        "norm_submultiplicative", "fourier_homomorphism", "orthogonal_additivity",
                        "symmetric_exp_symmetric", "antisymmetric_exp_abs_symmetric"})
    tab.declare(n, law_tol);
  for (const char* n : {"exp_total_mass", "exp_first_moment", "exp_second_moment", "exp_second_moment_printed_m1_zero"})
    tab.declare(n, exp_tol);

  const double freqs[] = {-2.7, -1.0, -0.3, 0.0, 0.45, 1.3, 3.1};
  for (std::size_t c = 0; c < count; ++c) {
    CounterStream rng(seed, c);
    const Measure mu = random_measure(rng, unit), nu = random_measure(rng, unit), rho = random_measure(rng, unit);
    const double nm = tv_norm(mu), nn = tv_norm(nu), nr = tv_norm(rho);
    const complex z{detail::uniform(rng, -2, 2), detail::uniform(rng, -2, 2)};

    tab.record("associativity",
               tv_norm(subtract(convolve(convolve(mu, nu), rho), convolve(mu, convolve(nu, rho)))) / (nm * nn * nr));
    tab.record("commutativity", tv_norm(subtract(convolve(mu, nu), convolve(nu, mu))) / (nm * nn));
    tab.record("distributivity",
               tv_norm(subtract(convolve(mu, add(nu, rho)), add(convolve(mu, nu), convolve(mu, rho)))) /
                   (nm * (nn + nr)));
    tab.record("identity", tv_norm(subtract(convolve(Measure::dirac(unit, 0), mu), mu)) / nm);
    tab.record("scalar_homogeneity",
               tv_norm(subtract(convolve(scale(z, mu), nu), scale(z, convolve(mu, nu)))) / (std::abs(z) * nm * nn));
    tab.record("norm_submultiplicative", std::max(0.0, tv_norm(convolve(mu, nu)) / (nm * nn) - 1.0));
    const Measure conv = convolve(mu, nu);
    for (double u : freqs)
      tab.record("fourier_homomorphism", std::abs(fourier(conv, u) - fourier(mu, u) * fourier(nu, u)) / (nm * nn));
    // shift nu beyond the support of mu
    std::vector<Measure::Atom> shifted;
    const std::int64_t off = mu.max_index() - nu.min_index() + 1;
    for (const auto& [j, w] : nu.atoms()) shifted.emplace_back(j + off, w);
    const Measure far(unit, shifted);
    tab.record("orthogonal_additivity", std::abs(tv_norm(add(mu, far)) - nm - nn) / (nm + nn));

    // exp identities with ||mu|| <= 3
    const double r = 3.0 * (0.05 + 0.95 * rng.uniform_open_left());
    const Measure e_mu = random_measure(rng, unit, 8, 10, r);
    const complex m0 = total_mass(e_mu), m1 = moment(e_mu, 1), m2 = moment(e_mu, 2);
    const Measure E = exp_measure(e_mu, 1e-17).measure;
    auto rel = [](complex got, complex want) { return std::abs(got - want) / (1.0 + std::abs(want)); };
    tab.record("exp_total_mass", rel(total_mass(E), std::exp(m0)));
    tab.record("exp_first_moment", rel(moment(E, 1), m1 * std::exp(m0)));
    tab.record("exp_second_moment", rel(moment(E, 2), (m2 + m1 * m1) * std::exp(m0)));
    // centred version: cancel the first moment with an atom at index 1, then rescale
    std::vector<Measure::Atom> atoms(e_mu.atoms().begin(), e_mu.atoms().end());
    atoms.emplace_back(1, -m1);
    Measure centred(unit, atoms);
    if (!centred.empty()) {
      centred = scale(r / tv_norm(centred), centred);
      const complex c0 = total_mass(centred), c1 = moment(centred, 1), c2 = moment(centred, 2);
      const Measure Ec = exp_measure(centred, 1e-17).measure;
      tab.record("exp_second_moment_printed_m1_zero",
                 rel(moment(Ec, 2), (c2 + 2.0 * std::norm(c1)) * std::exp(c0)));
    }

    // two-point symmetric / antisymmetric generators
    const auto s = static_cast<std::int64_t>(1 + rng.next_u64() % 5);
    const complex w{detail::uniform(rng, -1.5, 1.5), detail::uniform(rng, -1.5, 1.5)};
    auto asym = [](const Measure& m) {
      double worst = 0.0;
      for (const auto& [j, x] : m.atoms()) worst = std::max(worst, std::abs(x - m.weight(-j)));
      return worst / std::max(tv_norm(m), 1e-300);
    };
    const Measure plus = exp_measure(Measure(unit, {{s, w}, {-s, w}}), 1e-17).measure;
    const Measure minus = exp_measure(Measure(unit, {{s, w}, {-s, -w}}), 1e-17).measure;
    tab.record("symmetric_exp_symmetric", asym(plus));
    tab.record("antisymmetric_exp_abs_symmetric", asym(total_variation(minus)));
  }
  return tab.report();
}

struct TermSweepCase {
  complex a, b;
  TrigKind kind;
  double spacing, t;
  TermReport report;
};

struct TermSweepReport {
  std::vector<TermSweepCase> cases;
  double worst_fourier = 0.0;
  double worst_tv_excess = 0.0;
  double worst_first = 0.0;
  double worst_second_excess = 0.0;
  std::size_t failures = 0;

  bool pass() const { return failures == 0; }
};

/// Random (a, b, spacing, t) with Re a >= |b|, |b| <= 2, t in [0, 1].
inline TermSweepReport term_measure_sweep(std::size_t count, std::uint64_t seed, std::size_t xpoints = 101,
                                          const TermTolerances& tol = {}) {
  TermSweepReport rep;
  for (std::size_t c = 0; c < count; ++c) {
    CounterStream rng(seed ^ 0x5eed7e57ULL, c);
    const double bmag = 2.0 * rng.uniform_open_left();
    const complex b = std::polar(bmag, detail::uniform(rng, -pi, pi));
    const complex a{bmag + detail::uniform(rng, 0.0, 1.0), detail::uniform(rng, -2.0, 2.0)};
    const TrigKind kind = (rng.next_u64() & 1) ? TrigKind::cos : TrigKind::sin;
    const double spacing = detail::uniform(rng, 0.1, 3.0);
    const double t = rng.uniform_open_left();
    const auto xgrid = linspace(-10.0, 10.0, xpoints);
    const LatticeUnit unit{spacing, "spacing:" + fmt17(spacing)};
    const TermMeasure tm = build_term_measure(a, b, kind, unit, 1, t, 1e-15);
    const TermReport r = verify_term_measure(tm.measure, {a, b, kind, spacing, t}, xgrid, tol);
    rep.worst_fourier = std::max(rep.worst_fourier, r.fourier_residual);
    rep.worst_tv_excess = std::max(rep.worst_tv_excess, r.tv - 1.0);
    rep.worst_first = std::max(rep.worst_first, r.first_abs_moment);
    rep.worst_second_excess = std::max(rep.worst_second_excess, r.second_abs_moment - r.second_moment_bound);
    rep.failures += !r.all_ok();
    rep.cases.push_back({a, b, kind, spacing, t, r});
  }
  return rep;
}

}  // namespace symaudit
