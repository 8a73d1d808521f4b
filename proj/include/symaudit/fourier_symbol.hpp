#pragma once

// Fourier-series representations of symbols in the state variable,
//   q(x, u) = sum_n a_n(u) cos(k n x) + b_n(u) sin(k n x),
// and the two grid audits built on them: the dominance margin of -Re a_0 over
// the absolute sum of the oscillating coefficients, and the constant
// K = k^2 sup_u sum_n n^2 (|a_n| + |b_n|)/(1+u^2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symaudit/core.hpp"
#include "symaudit/symbol.hpp"

namespace symaudit {

struct FourierTerm {
  int n = 0;  // nonzero
  complex a;
  complex b;
};

struct FourierCoefficients {
  complex a0;
  std::vector<FourierTerm> terms;
  double truncation_residual = 0.0;  // bound on the dropped tail of sum (|a_n| + |b_n|)
};

/// All coefficients at one frequency come from one evaluation, so
/// quadrature-based symbols compute each u once.
struct FourierSymbol {
  double k = 1.0;
  std::function<FourierCoefficients(double)> coefficients;
  std::string label;

  complex reconstruct(double x, double u, std::optional<int> ncut = std::nullopt) const {
    const FourierCoefficients c = coefficients(u);
    complex q = c.a0;
    for (const auto& t : c.terms) {
      if (ncut && std::abs(t.n) > *ncut) continue;
      q += t.a * std::cos(k * t.n * x) + t.b * std::sin(k * t.n * x);
    }
    return q;
  }
};

/// (1 - cos x) psi(u): k = 1, a_0 = psi, a_{+-1} = -psi/2.
inline FourierSymbol fourier_symbol_of_product_cosine(const ExponentSpec& psi) {
  FourierSymbol fs;
  fs.k = 1.0;
  fs.label = "prodcos";
  fs.coefficients = [psi](double u) {
    const complex p = eval_exponent(psi, u);
    return FourierCoefficients{p, {{1, -0.5 * p, 0.0}, {-1, -0.5 * p, 0.0}}, 0.0};
  };
  return fs;
}

/// Re-index n -> -n with b -> -b. Describes the same function.
inline FourierSymbol reflect_indices(const FourierSymbol& fs) {
  FourierSymbol out = fs;
  out.label = fs.label + ":reflected";
  out.coefficients = [inner = fs.coefficients](double u) {
    FourierCoefficients c = inner(u);
    for (auto& t : c.terms) {
      t.n = -t.n;
      t.b = -t.b;
    }
    return c;
  };
  return out;
}

// ---- localisation ---------------------------------------------------------

namespace detail {

inline double bump_g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

inline double smoothstep(double r) {
  const double a = bump_g(r), b = bump_g(1.0 - r);
  return a / (a + b);
}

}  // namespace detail

/// Smooth window on [0, 1]: 1 on [1/4, 3/4], 0 outside [1/8, 7/8].
inline double plateau_bump(double y) {
  return detail::smoothstep(8.0 * (y - 0.125)) * detail::smoothstep(8.0 * (0.875 - y));
}

struct LocalizeOptions {
  int nmax = 64;
  int quadrature_points = 4096;
  double underresolved_ratio = 1e-3;
};

/// Localises q around x0 on a window of width 1/ell and expands in y:
///   q_l(y, u) = phi(y) (q(x0 + (y - 1/2)/ell, u) - psi(u)) + psi(u),  psi = q(x0, .),
///   c_n(u) = int_0^1 q_l(y, u) e^{-2 pi i n y} dy  (periodic trapezoid),
///   a_n = e^{2 pi i n (1/2 - ell x0)} c_n,  b_n = i a_n,  a_0 = c_0,  k = 2 pi ell.
/// On |x - x0| <= 1/(4 ell) the series reproduces q exactly (up to truncation).
inline FourierSymbol localize_fourierize(const SymbolSpec& spec, double x0, int ell,
                                         const LocalizeOptions& opt = {}) {
  if (ell < 1) throw DomainError("localisation index ell must be at least 1");
  if (opt.nmax < 1 || opt.quadrature_points < 2 * opt.nmax + 2)
    throw DomainError("need quadrature_points > 2 nmax + 1");
  const int Q = opt.quadrature_points;
  // window nodes and bump values do not depend on u
  auto nodes = std::make_shared<std::vector<double>>(Q);
  auto window = std::make_shared<std::vector<double>>(Q);
  auto twiddle = std::make_shared<std::vector<complex>>(Q);
  for (int j = 0; j < Q; ++j) {
    const double y = static_cast<double>(j) / Q;
    (*nodes)[j] = x0 + (y - 0.5) / ell;
    (*window)[j] = plateau_bump(y);
    (*twiddle)[j] = std::polar(1.0, -2.0 * pi * j / Q);
  }
  // the window must lie in the state space
  eval_symbol(spec, (*nodes)[0], 1.0);
  eval_symbol(spec, x0 + 0.5 / ell, 1.0);

  FourierSymbol fs;
  fs.k = 2.0 * pi * ell;
  fs.label = "localized:" + variant_name(spec);
  fs.coefficients = [spec, x0, ell, opt, nodes, window, twiddle](double u) {
    const int Q = opt.quadrature_points;
    const complex psi = eval_symbol(spec, x0, u);
    std::vector<complex> samples(Q);
    for (int j = 0; j < Q; ++j)
      samples[j] = (*window)[j] * (eval_symbol(spec, (*nodes)[j], u) - psi) + psi;
    auto coeff = [&](int n) {
      complex s{};
      const long step = ((static_cast<long>(n) % Q) + Q) % Q;
      long idx = 0;
      for (int j = 0; j < Q; ++j) {
        s += samples[j] * (*twiddle)[idx];
        idx += step;
        if (idx >= Q) idx -= Q;
      }
      return s / static_cast<double>(Q);
    };
    FourierCoefficients out;
    out.a0 = coeff(0);
    double abs_sum = std::abs(out.a0);
    double edge = 0.0;
    for (int n = -opt.nmax; n <= opt.nmax; ++n) {
      if (n == 0) continue;
      const complex c = coeff(n);
      const complex phase = std::polar(1.0, 2.0 * pi * n * (0.5 - ell * x0));
      const complex a = phase * c;
      out.terms.push_back({n, a, complex{0.0, 1.0} * a});
      abs_sum += std::abs(c);
      if (std::abs(n) == opt.nmax) edge = std::max(edge, std::abs(c));
    }
    if (abs_sum > 0.0 && edge > opt.underresolved_ratio * abs_sum)
      throw QuadratureUnderresolved("|c_nmax| = " + fmt17(edge) + " exceeds " +
                                    fmt17(opt.underresolved_ratio) + " of sum |c_n| at u = " + fmt17(u));
    // |a_n| + |b_n| = 2 |c_n|; decay estimate for the dropped tail, not a proof
    out.truncation_residual = 2.0 * edge * opt.nmax;
    return out;
  };
  return fs;
}

// ---- audits ---------------------------------------------------------------

inline double oscillating_abs_sum(const FourierCoefficients& c) {
  double s = 0.0;
  for (const auto& t : c.terms) s += std::abs(t.a) + std::abs(t.b);
  return s;
}

struct MarginPoint {
  double u = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
};

struct DominanceReport {
  std::vector<MarginPoint> points;
  double min_margin = 0.0;
  double u_at_min = 0.0;
  double worst_slack = 0.0;  // min over u of margin + tolerance
  bool pass = false;
};

/// margin(u) = -Re a_0 - sum_{n != 0} (|a_n| + |b_n|) - residual; passes when
/// margin >= -tol_eq(u), with tol_eq(u) = 1e-10 (1 + u^2) unless overridden.
/// Equality passes.
inline DominanceReport check_dominance(const FourierSymbol& fs, std::span<const double> ugrid,
                                       std::function<double(double)> tol_eq = {}) {
  if (!tol_eq) tol_eq = [](double u) { return 1e-10 * (1.0 + u * u); };
  DominanceReport rep;
  bool first = true;
  for (double u : ugrid) {
    const FourierCoefficients c = fs.coefficients(u);
    const double m = -c.a0.real() - oscillating_abs_sum(c) - c.truncation_residual;
    const double tol = tol_eq(u);
    rep.points.push_back({u, m, tol});
    if (first || m < rep.min_margin) {
      rep.min_margin = m;
      rep.u_at_min = u;
    }
    rep.worst_slack = first ? m + tol : std::min(rep.worst_slack, m + tol);
    first = false;
  }
  rep.pass = !first && rep.worst_slack >= 0.0;
  return rep;
}

struct KPoint {
  double u = 0.0;
  double integrand = 0.0;  // k^2 sum n^2 (|a_n| + |b_n|)/(1+u^2)
};

struct KReport {
  double K = 0.0;
  double u_star = 0.0;
  int max_index = 0;           // largest |n| present
  double edge_share = 0.0;     // share of the integrand at u* carried by |n| = max_index
  std::vector<KPoint> points;
};

/// K over a finite grid; the supremum over all u is not claimed.
inline KReport compute_K(const FourierSymbol& fs, std::span<const double> ugrid) {
  KReport rep;
  const double k2 = fs.k * fs.k;
  for (double u : ugrid) {
    const FourierCoefficients c = fs.coefficients(u);
    double s = 0.0, edge_part = 0.0;
    int nmax = 0;
    for (const auto& t : c.terms) nmax = std::max(nmax, std::abs(t.n));
    for (const auto& t : c.terms) {
      const double v = static_cast<double>(t.n) * t.n * (std::abs(t.a) + std::abs(t.b));
      s += v;
      if (std::abs(t.n) == nmax) edge_part += v;
    }
    const double val = k2 * s / (1.0 + u * u);
    rep.points.push_back({u, val});
    if (rep.points.size() == 1 || val > rep.K) {
      rep.K = val;
      rep.u_star = u;
      rep.max_index = nmax;
      rep.edge_share = s > 0.0 ? edge_part / s : 0.0;
    }
  }
  return rep;
}

}  // namespace symaudit
