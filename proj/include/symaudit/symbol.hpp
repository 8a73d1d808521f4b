#pragma once

// Symbols q(x, u): state-dependent Levy exponents, their Levy-Khintchine
// triplets (b(x), c(x), F(x, .)) relative to the hard-cutoff truncation
// chi(y) = y 1{|y| <= 1}, and the generator they induce on test functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "symaudit/core.hpp"

namespace symaudit {

inline double truncation(double y) { return std::abs(y) <= 1.0 ? y : 0.0; }

struct JumpAtom {
  double location = 0.0;  // nonzero
  double rate = 0.0;      // positive
};

/// Finite-activity triplet.
struct LevyTriplet {
  double drift = 0.0;
  double diffusion = 0.0;
  std::vector<JumpAtom> jumps;

  double total_rate() const {
    double s = 0.0;
    for (const auto& a : jumps) s += a.rate;
    return s;
  }
};

inline void validate(const LevyTriplet& t) {
  if (!(t.diffusion >= 0.0)) throw DomainError("diffusion coefficient must be nonnegative");
  for (const auto& a : t.jumps) {
    if (!(a.rate > 0.0)) throw DomainError("jump rates must be positive");
    if (a.location == 0.0) throw DomainError("Levy measure may not charge the origin");
  }
}

/// i u b - u^2 c / 2 + sum_j rate_j (e^{i u y_j} - 1 - i u chi(y_j)).
inline complex levy_khintchine(const LevyTriplet& t, double u) {
  complex q{0.0, u * t.drift};
  q -= 0.5 * u * u * t.diffusion;
  for (const auto& a : t.jumps) {
    // e^{iuy} - 1 = 2i sin(uy/2) e^{iuy/2}, free of cancellation at small uy
    const double h = 0.5 * u * a.location;
    const complex em1 = complex{0.0, 2.0 * std::sin(h)} * std::polar(1.0, h);
    q += a.rate * (em1 - complex{0.0, u * truncation(a.location)});
  }
  return q;
}

// ---- exponents psi(u) -------------------------------------------------------

struct BrownianNeg {};  // psi(u) = -u^2/2
struct TripletExponent {
  LevyTriplet triplet;
};
using ExponentSpec = std::variant<BrownianNeg, TripletExponent>;

inline LevyTriplet triplet_of(const ExponentSpec& psi) {
  if (std::holds_alternative<BrownianNeg>(psi)) return {0.0, 1.0, {}};
  return std::get<TripletExponent>(psi).triplet;
}

inline complex eval_exponent(const ExponentSpec& psi, double u) {
  if (std::holds_alternative<BrownianNeg>(psi)) return -0.5 * u * u;
  return levy_khintchine(std::get<TripletExponent>(psi).triplet, u);
}

// ---- symbols ----------------------------------------------------------------

/// (cos(xu) - 1)/x^2, continued by -u^2/2 at x = 0.
struct Ex31 {};
/// Ex31 outside (-k 2^-n, k 2^-n); inside, 4^n (cos(u k 2^-n) - 1)/k^2.
struct Ex31Approx {
  LatticeUnit k;
  int n = 0;
};
/// (e^{iux} - 1)/x on x >= 0, iu at x = 0.
struct Ex32 {};
/// Ex32 evaluated at the clamp h(x) = (x v k 2^-n) ^ k 2^n.
struct Ex32Approx {
  LatticeUnit k;
  int n = 0;
};
/// (1 - cos x) psi(u).
struct ProductCosine {
  ExponentSpec psi;
};
struct ConstantSymbol {
  ExponentSpec psi;
};
/// User-supplied state-dependent triplet.
struct TripletField {
  std::function<LevyTriplet(double)> triplet;
  std::string label = "triplet_field";
};

using SymbolSpec =
    std::variant<Ex31, Ex31Approx, Ex32, Ex32Approx, ProductCosine, ConstantSymbol, TripletField>;

inline std::string variant_name(const SymbolSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ex31>) return "ex31";
        if constexpr (std::is_same_v<T, Ex31Approx>) return "ex31approx";
        if constexpr (std::is_same_v<T, Ex32>) return "ex32";
        if constexpr (std::is_same_v<T, Ex32Approx>) return "ex32approx";
        if constexpr (std::is_same_v<T, ProductCosine>) return "prodcos";
        if constexpr (std::is_same_v<T, ConstantSymbol>) return "constant";
        if constexpr (std::is_same_v<T, TripletField>) return "triplet_field";
      },
      spec);
}

namespace detail {

inline double lattice_floor(const LatticeUnit& k, int n) { return k.value * std::ldexp(1.0, -n); }
inline double lattice_ceiling(const LatticeUnit& k, int n) { return k.value * std::ldexp(1.0, n); }

inline double ex32_clamp(const Ex32Approx& s, double x) {
  return std::min(std::max(x, lattice_floor(s.k, s.n)), lattice_ceiling(s.k, s.n));
}

// (cos(xu) - 1)/x^2 = -2 sin^2(xu/2)/x^2, with a series once xu is tiny.
inline double ex31_closed(double x, double u) {
  const double z = x * u;
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return -0.5 * u * u * (1.0 - z2 / 12.0 + z2 * z2 / 360.0);
  }
  const double s = std::sin(0.5 * z);
  return -2.0 * s * s / (x * x);
}

// (e^{iux} - 1)/x for x > 0.
inline complex ex32_closed(double x, double u) {
  const double z = x * u;
  if (std::abs(z) < 1e-4) {
    // iu (1 + iz/2 - z^2/6 - i z^3/24)
    return complex{0.0, u} * complex{1.0 - z * z / 6.0, 0.5 * z - z * z * z / 24.0};
  }
  const double h = 0.5 * z;
  return complex{0.0, 2.0 * std::sin(h)} * std::polar(1.0, h) / x;
}

inline void require_state(const Ex32&, double x) {
  if (!(x >= 0.0)) throw DomainError("Ex32 lives on x >= 0, got x = " + fmt17(x));
}

}  // namespace detail

inline complex eval_symbol(const SymbolSpec& spec, double x, double u) {
  return std::visit(
      [&](const auto& s) -> complex {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ex31>) {
          return detail::ex31_closed(x, u);
        } else if constexpr (std::is_same_v<T, Ex31Approx>) {
          const double delta = detail::lattice_floor(s.k, s.n);
          if (std::abs(x) >= delta) return detail::ex31_closed(x, u);
          const double half = 0.5 * u * delta;
          const double sn = std::sin(half);
          // 4^n (cos(u delta) - 1)/k^2 = -2 sin^2(u delta/2)/delta^2
          return -2.0 * sn * sn / (delta * delta);
        } else if constexpr (std::is_same_v<T, Ex32>) {
          detail::require_state(s, x);
          if (x == 0.0) return complex{0.0, u};
          return detail::ex32_closed(x, u);
        } else if constexpr (std::is_same_v<T, Ex32Approx>) {
          return detail::ex32_closed(detail::ex32_clamp(s, x), u);
        } else if constexpr (std::is_same_v<T, ProductCosine>) {
          return (1.0 - std::cos(x)) * eval_exponent(s.psi, u);
        } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
          return eval_exponent(s.psi, u);
        } else {
          return levy_khintchine(s.triplet(x), u);
        }
      },
      spec);
}

struct TripletAt {
  LevyTriplet triplet;
  bool has_diffusion = false;  // c > 0: not simulable as a pure-jump process
};

inline TripletAt triplet_of(const SymbolSpec& spec, double x) {
  LevyTriplet t = std::visit(
      [&](const auto& s) -> LevyTriplet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ex31>) {
          if (x == 0.0) return {0.0, 1.0, {}};
          const double r = 0.5 / (x * x);
          return {0.0, 0.0, {{x, r}, {-x, r}}};
        } else if constexpr (std::is_same_v<T, Ex31Approx>) {
          const double delta = detail::lattice_floor(s.k, s.n);
          const double y = std::abs(x) >= delta ? x : delta;
          const double r = 0.5 / (y * y);
          return {0.0, 0.0, {{std::abs(y), r}, {-std::abs(y), r}}};
        } else if constexpr (std::is_same_v<T, Ex32>) {
          detail::require_state(s, x);
          if (x == 0.0) return {1.0, 0.0, {}};
          return {truncation(x) / x, 0.0, {{x, 1.0 / x}}};
        } else if constexpr (std::is_same_v<T, Ex32Approx>) {
          const double h = detail::ex32_clamp(s, x);
          return {truncation(h) / h, 0.0, {{h, 1.0 / h}}};
        } else if constexpr (std::is_same_v<T, ProductCosine>) {
          const double w = 1.0 - std::cos(x);
          LevyTriplet base = triplet_of(s.psi);
          LevyTriplet out{w * base.drift, w * base.diffusion, {}};
          if (w > 0.0)
            for (const auto& a : base.jumps) out.jumps.push_back({a.location, w * a.rate});
          return out;
        } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
          return triplet_of(s.psi);
        } else {
          LevyTriplet user = s.triplet(x);
          validate(user);
          return user;
        }
      },
      spec);
  const bool diff = t.diffusion > 0.0;
  return {std::move(t), diff};
}

/// Values and derivatives of a real test function. Derivatives are either
/// supplied exactly or estimated by central differences (flagged).
struct TestFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  bool finite_difference = false;

  static TestFunction exact(std::function<double(double)> f, std::function<double(double)> df,
                            std::function<double(double)> d2f) {
    return {std::move(f), std::move(df), std::move(d2f), false};
  }

  /// Central differences with step 1e-5 (1 + |x|).
  static TestFunction from_values(std::function<double(double)> f) {
    auto step = [](double x) { return 1e-5 * (1.0 + std::abs(x)); };
    auto df = [f, step](double x) {
      const double h = step(x);
      return (f(x + h) - f(x - h)) / (2.0 * h);
    };
    auto d2f = [f, step](double x) {
      const double h = step(x);
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    };
    return {f, df, d2f, true};
  }

  static TestFunction monomial(int p) {
    return exact([p](double x) { return std::pow(x, p); },
                 [p](double x) { return p == 0 ? 0.0 : p * std::pow(x, p - 1); },
                 [p](double x) { return p < 2 ? 0.0 : p * (p - 1) * std::pow(x, p - 2); });
  }

  static TestFunction constant(double c) {
    return exact([c](double) { return c; }, [](double) { return 0.0; },
                 [](double) { return 0.0; });
  }
};

/// Generator through the triplet:
/// f'(x) b + f''(x) c / 2 + sum_j rate_j (f(x + y_j) - f(x) - f'(x) chi(y_j)).
inline double apply_generator(const SymbolSpec& spec, const TestFunction& tf, double x) {
  const TripletAt at = triplet_of(spec, x);
  const auto& t = at.triplet;
  const double fx = tf.f(x);
  const double dfx = tf.df(x);
  CompensatedSum s;
  if (t.drift != 0.0) s.add(dfx * t.drift);
  if (at.has_diffusion) s.add(0.5 * tf.d2f(x) * t.diffusion);
  for (const auto& a : t.jumps) s.add(a.rate * (tf.f(x + a.location) - fx - dfx * truncation(a.location)));
  return s.value();
}

/// The difference-quotient operators of the two lattice approximations,
/// written out directly rather than through the triplet.
inline double approx_generator_closed_form(const SymbolSpec& spec, const std::function<double(double)>& f,
                                           double x) {
  if (const auto* s = std::get_if<Ex31Approx>(&spec)) {
    const double delta = detail::lattice_floor(s->k, s->n);
    if (std::abs(x) >= delta) return (f(2.0 * x) - 2.0 * f(x) + f(0.0)) / (2.0 * x * x);
    const double k2 = s->k.value * s->k.value;
    return std::ldexp(1.0, 2 * s->n) * (f(x + delta) - 2.0 * f(x) + f(x - delta)) / (2.0 * k2);
  }
  if (const auto* s = std::get_if<Ex32Approx>(&spec)) {
    const double h = detail::ex32_clamp(*s, x);
    return (f(x + h) - f(x)) / h;
  }
  throw UnsupportedSpec("closed-form generator exists only for ex31approx and ex32approx");
}

struct BoundednessPoint {
  double x = 0.0;
  double g = 0.0;
};

struct BoundednessReport {
  std::vector<BoundednessPoint> points;
  double sup = 0.0;
  double argsup = 0.0;
  bool sup_at_grid_edge = false;  // supremum sits on an endpoint: possibly unbounded beyond
};

/// g(x) = |b(x)| + c(x) + int |y|^2 F(x, dy) over a grid.
inline BoundednessReport boundedness_audit(const SymbolSpec& spec, std::span<const double> xgrid) {
  BoundednessReport rep;
  std::size_t best = 0;
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    const auto t = triplet_of(spec, xgrid[i]).triplet;
    double g = std::abs(t.drift) + t.diffusion;
    for (const auto& a : t.jumps) g += a.rate * a.location * a.location;
    rep.points.push_back({xgrid[i], g});
    if (i == 0 || g > rep.sup) {
      rep.sup = g;
      rep.argsup = xgrid[i];
      best = i;
    }
  }
  rep.sup_at_grid_edge =
      !xgrid.empty() && (best == 0 || best + 1 == xgrid.size()) && xgrid.size() > 1 &&
      rep.points[best].g > rep.points[best == 0 ? 1 : best - 1].g;
  return rep;
}

struct HoelderRow {
  double x = 0.0;
  double y = 0.0;
  double modulus = 0.0;                 // sup_u |q(x,u) - q(y,u)|/(1+u^2)
  std::optional<double> mean_value_bound;  // min{2 S0, |x-y| S1}
};

/// Suprema of |q|/(1+u^2) and |d_x q|/(1+u^2) for the mean-value bound.
struct HoelderBounds {
  double sup_symbol = 0.0;
  double sup_derivative = 0.0;
};

inline std::vector<HoelderRow> hoelder_modulus(const SymbolSpec& spec,
                                               std::span<const std::pair<double, double>> pairs,
                                               std::span<const double> ugrid,
                                               std::optional<HoelderBounds> bounds = std::nullopt) {
  std::vector<HoelderRow> rows;
  for (const auto& [x, y] : pairs) {
    HoelderRow r{x, y, 0.0, std::nullopt};
    for (double u : ugrid)
      r.modulus = std::max(r.modulus, std::abs(eval_symbol(spec, x, u) - eval_symbol(spec, y, u)) /
                                          (1.0 + u * u));
    if (bounds)
      r.mean_value_bound = std::min(2.0 * bounds->sup_symbol, std::abs(x - y) * bounds->sup_derivative);
    rows.push_back(r);
  }
  return rows;
}

/// psi = q(x0, .) as a callable.
inline std::function<complex(double)> exponent_at(const SymbolSpec& spec, double x0) {
  return [spec, x0](double u) { return eval_symbol(spec, x0, u); };
}

inline std::function<complex(double)> as_function(const ExponentSpec& psi) {
  return [psi](double u) { return eval_exponent(psi, u); };
}

}  // namespace symaudit
