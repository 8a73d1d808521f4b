#pragma once

// Monte-Carlo statistics tying simulated ensembles to closed-form claims:
// polynomial moments, empirical characteristic functions, the weighted
// sup-distance sup_u |phi_A(u) - phi_B(u)|/(1+u^2), exact lattice-support
// audits, and Dynkin martingale residuals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symaudit/core.hpp"
#include "symaudit/exact_state.hpp"
#include "symaudit/simulate.hpp"
#include "symaudit/symbol.hpp"

namespace symaudit {

enum class Example { ex31, ex32 };

/// Closed-form moments of both counterexample families started at 0:
///   Ex31: 1{n even} t^{n/2}/(n/2)! prod_{k=1}^{n/2} (2^{2k-1} - 1)
///   Ex32: t^n/n! prod_{k=1}^{n} (2^k - 1)
inline double closed_moment(Example ex, int n, double t) {
  if (n < 0) throw DomainError("moment order must be nonnegative");
  if (n == 0) return 1.0;
  if (ex == Example::ex31) {
    if (n % 2 != 0) return 0.0;
    const int h = n / 2;
    double v = 1.0;
    for (int k = 1; k <= h; ++k) v *= (std::ldexp(1.0, 2 * k - 1) - 1.0) * t / k;
    return v;
  }
  double v = 1.0;
  for (int k = 1; k <= n; ++k) v *= (std::ldexp(1.0, k) - 1.0) * t / k;
  return v;
}

/// Ensemble endpoints at one time. Exact lattice states are kept when the
/// sample came from the simulator; a projected sample carries reals only.
struct Sample {
  double time = 0.0;
  std::vector<double> values;
  std::optional<LatticeUnit> unit;
  std::vector<Dyadic> states;  // empty once projected
  std::string provenance;

  static Sample from_ensemble(const EnsembleResult& e, std::string provenance = {}) {
    Sample s;
    s.time = e.horizon;
    s.unit = e.unit;
    s.states = e.endpoints;
    s.values.reserve(e.endpoints.size());
    for (const auto& d : e.endpoints) s.values.push_back(e.unit.value * d.to_double());
    s.provenance = std::move(provenance);
    return s;
  }

  static Sample from_values(std::vector<double> values, double time, std::string provenance = {}) {
    Sample s;
    s.time = time;
    s.values = std::move(values);
    s.provenance = std::move(provenance);
    return s;
  }

  bool exact() const { return unit.has_value() && states.size() == values.size(); }
  std::size_t size() const { return values.size(); }
};

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Mean and CLT standard error of an iid sample.
inline MeanEstimate mean_se(std::span<const double> xs) {
  if (xs.size() < 2) throw DegenerateSample("need at least two observations for a standard error");
  const double n = static_cast<double>(xs.size());
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  const double var = ss.value() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

inline MeanEstimate moment_ci(const Sample& sample, int p) {
  if (p < 1) throw DomainError("moment order must be at least 1");
  std::vector<double> powered;
  powered.reserve(sample.size());
  for (double x : sample.values) powered.push_back(std::pow(x, p));
  return mean_se(powered);
}

/// Acceptance allowance for MC moments of the lattice approximations at
/// n = 10: 3 SE plus a bias allowance (0.05 for order 2, 0.1 above),
/// 4 SE for odd Ex31 orders (zero by symmetry) and 3 SE for Ex32 order 1
/// (the generator maps x to 1 exactly).
inline double moment_tolerance(Example ex, int order, double se) {
  if (ex == Example::ex31 && order % 2 == 1) return 4.0 * se;
  if (order == 1) return 3.0 * se;
  if (order == 2) return 3.0 * se + 0.05;
  return 3.0 * se + 0.1;
}

struct EcfPoint {
  double u = 0.0;
  complex mean;
  double se_re = 0.0;
  double se_im = 0.0;

  double se_abs() const { return std::hypot(se_re, se_im); }
};

inline EcfPoint ecf_at(const Sample& sample, double u) {
  const std::size_t n = sample.size();
  if (n == 0) throw DegenerateSample("empty sample");
  CompensatedSum c, s;
  for (double x : sample.values) {
    c.add(std::cos(u * x));
    s.add(std::sin(u * x));
  }
  const double dn = static_cast<double>(n);
  const double mc = c.value() / dn;
  const double ms = s.value() / dn;
  EcfPoint p{u, {mc, ms}, 0.0, 0.0};
  if (n >= 2 && u != 0.0) {
    CompensatedSum vc, vs;
    for (double x : sample.values) {
      const double dc = std::cos(u * x) - mc;
      const double ds = std::sin(u * x) - ms;
      vc.add(dc * dc);
      vs.add(ds * ds);
    }
    p.se_re = std::sqrt(vc.value() / (dn - 1.0) / dn);
    p.se_im = std::sqrt(vs.value() / (dn - 1.0) / dn);
  }
  return p;
}

inline std::vector<EcfPoint> ecf(const Sample& sample, std::span<const double> ugrid) {
  std::vector<EcfPoint> out;
  out.reserve(ugrid.size());
  for (double u : ugrid) out.push_back(ecf_at(sample, u));
  return out;
}

/// 201 points, linear on [-20, 20].
inline std::vector<double> default_ugrid() { return linspace(-20.0, 20.0, 201); }

struct EcfContribution {
  double u = 0.0;
  complex a, b;
  double weighted_abs_diff = 0.0;
};

struct EcfDistance {
  double d = 0.0;
  double u_star = 0.0;
  double se_bound = 0.0;  // (SE_A + SE_B)(u*)/(1+u*^2)
  std::vector<EcfContribution> contributions;
};

/// d = max_u |ecf_A(u) - ecf_B(u)|/(1+u^2) on the grid, then refined by a
/// golden-section search on the bracketing interval of the grid argmax.
inline EcfDistance ecf_distance(const Sample& a, const Sample& b, std::span<const double> ugrid,
                                bool refine = true) {
  if (a.time != b.time) throw DomainError("ecf_distance compares samples at the same time");
  EcfDistance out;
  std::size_t best = 0;
  std::vector<EcfPoint> ea = ecf(a, ugrid), eb = ecf(b, ugrid);
  for (std::size_t i = 0; i < ugrid.size(); ++i) {
    const double w = std::abs(ea[i].mean - eb[i].mean) / (1.0 + ugrid[i] * ugrid[i]);
    out.contributions.push_back({ugrid[i], ea[i].mean, eb[i].mean, w});
    if (i == 0 || w > out.d) {
      out.d = w;
      best = i;
    }
  }
  if (ugrid.empty()) return out;
  out.u_star = ugrid[best];
  out.se_bound = (ea[best].se_abs() + eb[best].se_abs()) / (1.0 + out.u_star * out.u_star);

  if (refine && ugrid.size() >= 3) {
    auto weighted = [&](double u) {
      return std::abs(ecf_at(a, u).mean - ecf_at(b, u).mean) / (1.0 + u * u);
    };
    double lo = ugrid[best == 0 ? 0 : best - 1];
    double hi = ugrid[std::min(best + 1, ugrid.size() - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = weighted(c), fd = weighted(d);
    for (int it = 0; it < 40 && hi - lo > 1e-9 * (1.0 + std::abs(hi)); ++it) {
      if (fc > fd) {
        hi = d; d = c; fd = fc;
        c = hi - gr * (hi - lo);
        fc = weighted(c);
      } else {
        lo = c; c = d; fc = fd;
        d = lo + gr * (hi - lo);
        fd = weighted(d);
      }
    }
    const double u = fc > fd ? c : d;
    const double val = std::max(fc, fd);
    if (val > out.d) {
      const EcfPoint pa = ecf_at(a, u), pb = ecf_at(b, u);
      out.d = val;
      out.u_star = u;
      out.se_bound = (pa.se_abs() + pb.se_abs()) / (1.0 + u * u);
    }
  }
  return out;
}

struct SupportAudit {
  std::size_t total = 0;
  std::size_t nonzero = 0;
  std::size_t off_lattice = 0;
};

/// Exact count of states outside the lattice, decided on the integer
/// representation. A projected sample cannot be audited.
inline SupportAudit support_audit(const Sample& sample, const Lattice& lattice) {
  if (!sample.exact()) throw RepresentationLost("sample carries no exact lattice states");
  SupportAudit a;
  a.total = sample.states.size();
  for (const auto& d : sample.states) {
    if (!d.is_zero()) ++a.nonzero;
    if (!on_lattice(ExactState{*sample.unit, d}, lattice)) ++a.off_lattice;
  }
  return a;
}

struct DynkinSnapshot {
  double time = 0.0;
  MeanEstimate generator_mean;  // E[Af(X(t))]
};

struct DynkinResidual {
  double residual = 0.0;   // E f(X_T) - f(x0) - int_0^T E[Af(X_s)] ds
  double se = 0.0;
  double quadrature_error = 0.0;  // (T/12) h^2 max |g''| from second differences
  double terminal_mean = 0.0;
  double integral = 0.0;
  std::vector<DynkinSnapshot> snapshots;
  std::size_t truncated_paths = 0;
};

/// Each grid time t_i > 0 gets a fresh ensemble of `paths` endpoints
/// (seeds mixed with the snapshot index); the integral uses the trapezoid rule.
inline DynkinResidual dynkin_residual(const SymbolSpec& spec, const TestFunction& tf, const Dyadic& x0,
                                      std::span<const double> timegrid, std::size_t paths,
                                      std::uint64_t seed, unsigned threads = 0) {
  if (timegrid.size() < 2 || timegrid.front() != 0.0)
    throw DomainError("time grid must start at 0 and contain at least two points");
  for (std::size_t i = 1; i < timegrid.size(); ++i)
    if (!(timegrid[i] > timegrid[i - 1])) throw DomainError("time grid must be strictly increasing");

  const ApproxRule rule = jump_rule_of(spec);
  const double k = rule.unit().value;
  const double x0v = k * x0.to_double();
  const std::size_t m = timegrid.size() - 1;
  const double T = timegrid.back();

  std::vector<double> w(timegrid.size(), 0.0);  // trapezoid weights
  for (std::size_t i = 0; i < m; ++i) {
    const double h = timegrid[i + 1] - timegrid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }

  DynkinResidual out;
  std::vector<double> g(timegrid.size());
  g[0] = apply_generator(spec, tf, x0v);
  out.snapshots.push_back({0.0, {g[0], 0.0}});
  double var = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    SimConfig cfg;
    cfg.horizon = timegrid[i];
    cfg.paths = paths;
    cfg.seed = mix64(seed ^ (0xD1B54A32D192ED03ULL * (i + 1)));
    cfg.threads = threads;
    const EnsembleResult e = simulate_ensemble(rule, x0, cfg);
    out.truncated_paths += e.truncated_paths;
    std::vector<double> af(paths);
    for (std::size_t p = 0; p < paths; ++p) af[p] = apply_generator(spec, tf, k * e.endpoints[p].to_double());
    const MeanEstimate est = mean_se(af);
    g[i] = est.mean;
    out.snapshots.push_back({timegrid[i], est});
    if (i < m) {
      var += w[i] * w[i] * est.se * est.se;
    } else {
      // the terminal ensemble enters both E f(X_T) and the last quadrature node
      std::vector<double> combined(paths), fT(paths);
      for (std::size_t p = 0; p < paths; ++p) {
        fT[p] = tf.f(k * e.endpoints[p].to_double());
        combined[p] = fT[p] - w[i] * af[p];
      }
      out.terminal_mean = mean_se(fT).mean;
      const MeanEstimate c = mean_se(combined);
      var += c.se * c.se;
    }
  }
  CompensatedSum integral;
  for (std::size_t i = 0; i <= m; ++i) integral.add(w[i] * g[i]);
  out.integral = integral.value();
  out.residual = out.terminal_mean - tf.f(x0v) - out.integral;
  out.se = std::sqrt(var);

  double worst = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double h1 = timegrid[i] - timegrid[i - 1];
    const double h2 = timegrid[i + 1] - timegrid[i];
    const double second = 2.0 * ((g[i + 1] - g[i]) / h2 - (g[i] - g[i - 1]) / h1) / (h1 + h2);
    const double h = std::max(h1, h2);
    worst = std::max(worst, std::abs(second) * h * h);
  }
  out.quadrature_error = T * worst / 12.0;
  return out;
}

}  // namespace symaudit
