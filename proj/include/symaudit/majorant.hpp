#pragma once

// Complex measures whose Fourier transforms are exp(t (b trig(s x) - a)),
// built as e^{-ta} exp(t b mu) with mu = (delta_s + delta_{-s})/2 (cos) or
// (delta_s - delta_{-s})/(2i) (sin), and their convolution into a measure
// P_{t,u} with transform e^{t q(x,u)} for a Fourier-series symbol q.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "symaudit/fourier_symbol.hpp"
#include "symaudit/measure.hpp"

namespace symaudit {

enum class TrigKind { cos, sin };

inline const char* to_string(TrigKind k) { return k == TrigKind::cos ? "cos" : "sin"; }

struct TermMeasure {
  Measure measure;
  SeriesOrder order;
};

/// Base measure mu on `unit` with atoms at +-multiple.
inline Measure trig_base_measure(TrigKind kind, const LatticeUnit& unit, std::int64_t multiple) {
  if (kind == TrigKind::cos)
    return Measure(unit, {{multiple, 0.5}, {-multiple, 0.5}});
  const complex w = 1.0 / complex{0.0, 2.0};
  return Measure(unit, {{multiple, w}, {-multiple, -w}});
}

/// e^{-ta} exp(t b mu). The series tolerance is rescaled by e^{t Re a} so the
/// returned measure is within `tol` in total variation.
inline TermMeasure build_term_measure(complex a, complex b, TrigKind kind, const LatticeUnit& unit,
                                      std::int64_t multiple, double t, double tol) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("term measures are defined for t in [0, 1]");
  if (multiple <= 0) throw DomainError("lattice multiple must be positive");
  const Measure mu = scale(t * b, trig_base_measure(kind, unit, multiple));
  const double tol_series = std::min(tol * std::exp(t * a.real()), std::numeric_limits<double>::max());
  const ExpResult e = exp_measure(mu, tol_series);
  return {scale(std::exp(-t * a), e.measure), e.order};
}

/// The spacing form: unit = spacing, atoms at +-1, a = |coef|, b = coef.
inline TermMeasure build_term_measure(complex coef, TrigKind kind, double spacing, double t, double tol) {
  if (!(spacing > 0.0)) throw DomainError("spacing must be positive");
  return build_term_measure(std::abs(coef), coef, kind, LatticeUnit{spacing, "spacing:" + fmt17(spacing)}, 1,
                            t, tol);
}

struct TermExpectation {
  complex a;
  complex b;
  TrigKind kind = TrigKind::cos;
  double spacing = 1.0;
  double t = 0.0;
};

struct TermTolerances {
  double fourier = 1e-8;
  double tv = 1e-10;
  double first_moment = 1e-10;
  double second_moment = 1e-8;
};

struct TermReport {
  bool hypothesis = false;  // Re a >= |b|
  double fourier_residual = 0.0;
  double tv = 0.0;
  double first_abs_moment = 0.0;
  double second_abs_moment = 0.0;
  double second_moment_bound = 0.0;  // t |b| spacing^2
  bool fourier_ok = false, tv_ok = false, first_ok = false, second_ok = false;

  bool all_ok() const { return fourier_ok && tv_ok && first_ok && second_ok; }
};

/// Checks the four properties of a term measure. When Re a < |b| the report
/// records the breached hypothesis; property (2) may then fail legitimately.
inline TermReport verify_term_measure(const Measure& P, const TermExpectation& ex,
                                      std::span<const double> xgrid, const TermTolerances& tol = {}) {
  TermReport r;
  r.hypothesis = ex.a.real() >= std::abs(ex.b);
  for (double x : xgrid) {
    const double trig = ex.kind == TrigKind::cos ? std::cos(ex.spacing * x) : std::sin(ex.spacing * x);
    const complex target = std::exp(ex.t * (ex.b * trig - ex.a));
    r.fourier_residual = std::max(r.fourier_residual, std::abs(fourier(P, x) - target));
  }
  const Measure absP = total_variation(P);
  r.tv = tv_norm(P);
  r.first_abs_moment = std::abs(moment(absP, 1));
  r.second_abs_moment = moment(absP, 2).real();
  r.second_moment_bound = ex.t * std::abs(ex.b) * ex.spacing * ex.spacing;
  r.fourier_ok = r.fourier_residual <= tol.fourier;
  r.tv_ok = r.tv <= 1.0 + tol.tv;
  r.first_ok = r.first_abs_moment <= tol.first_moment;
  r.second_ok = r.second_abs_moment <= r.second_moment_bound + tol.second_moment;
  return r;
}

struct MajorantOptions {
  double exp_tol = 1e-13;
  double check_tol = 1e-6;
};

struct MajorantReport {
  Measure measure;
  complex a0_tilde;                 // a_0 + sum (|a_n| + |b_n|)
  std::size_t factors = 0;
  double condition1_residual = 0.0;  // max_x |P^(x) - e^{t q_rec(x,u)}|
  double weighted_mass = 0.0;       // int (1+|u+v|^2)/(1+|u|^2) |P|(dv)
  double k_sigma = 0.0;             // k^2 sum n^2 (|a_n| + |b_n|)
  double k_sigma_normalized = 0.0;  // k_sigma / (1+u^2)
  double condition2_bound = 0.0;    // 1 + k_sigma_normalized t + check_tol
  double tv = 0.0;
  double second_moment_sum = 0.0;
  std::size_t uncentred_factors = 0;
  bool condition1 = false;
  bool condition2 = false;
};

/// Rewrites the truncated series as
///   q = a~_0 + sum_n (a_n cos(knx) - |a_n|) + (b_n sin(knx) - |b_n|),
/// builds e^{t a~_0} delta_0 and one term measure per coefficient on the
/// base-k lattice, and convolves them.
inline MajorantReport assemble_majorant(const FourierSymbol& fs, double u, double t, int ncut,
                                        std::span<const double> xgrid, const MajorantOptions& opt = {}) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("majorants are built for t in [0, 1]");
  const FourierCoefficients c = fs.coefficients(u);
  std::vector<FourierTerm> kept;
  for (const auto& term : c.terms)
    if (std::abs(term.n) <= ncut) kept.push_back(term);

  MajorantReport rep;
  rep.a0_tilde = c.a0;
  for (const auto& term : kept) rep.a0_tilde += std::abs(term.a) + std::abs(term.b);
  if (rep.a0_tilde.real() > opt.check_tol)
    throw ViolatedDominance("Re a~_0(u) = " + fmt17(rep.a0_tilde.real()) + " > 0 at u = " + fmt17(u));

  const LatticeUnit unit{fs.k, "fourier_k:" + fmt17(fs.k)};
  std::vector<Measure> factors;
  factors.push_back(Measure::dirac(unit, 0, std::exp(t * rep.a0_tilde)));
  for (const auto& term : kept) {
    const std::int64_t m = std::abs(term.n);
    const double sign = term.n > 0 ? 1.0 : -1.0;  // sin(knx) = sign(n) sin(k|n|x)
    if (term.a != complex{})
      factors.push_back(build_term_measure(std::abs(term.a), term.a, TrigKind::cos, unit, m, t, opt.exp_tol).measure);
    if (term.b != complex{})
      factors.push_back(
          build_term_measure(std::abs(term.b), sign * term.b, TrigKind::sin, unit, m, t, opt.exp_tol).measure);
    rep.k_sigma += fs.k * fs.k * static_cast<double>(m * m) * (std::abs(term.a) + std::abs(term.b));
  }
  rep.factors = factors.size();
  const ConvolutionFold fold = convolve_sequence(factors, opt.check_tol);
  rep.measure = fold.measure;
  rep.second_moment_sum = fold.second_moment_sum;
  rep.uncentred_factors = fold.uncentred.size();

  for (double x : xgrid) {
    const complex target = std::exp(t * fs.reconstruct(x, u, ncut));
    rep.condition1_residual = std::max(rep.condition1_residual, std::abs(fourier(rep.measure, x) - target));
  }
  CompensatedSum wm;
  const double denom = 1.0 + u * u;
  for (const auto& [j, w] : rep.measure.atoms()) {
    const double v = rep.measure.location(j);
    wm.add((1.0 + (u + v) * (u + v)) / denom * std::abs(w));
  }
  rep.weighted_mass = wm.value();
  rep.tv = tv_norm(rep.measure);
  rep.k_sigma_normalized = rep.k_sigma / denom;
  rep.condition2_bound = 1.0 + rep.k_sigma_normalized * t + opt.check_tol;
  rep.condition1 = rep.condition1_residual <= opt.check_tol;
  rep.condition2 = rep.weighted_mass <= rep.condition2_bound;
  return rep;
}

}  // namespace symaudit
