#pragma once

// Grid audit of the smoothness/ellipticity bounds
//   |d_x^b q(x,u)| <= L |Re psi(u)|   (orders b <= 1 in one dimension)
//   |d_x^a q(x,u)| <= L (1 + u^2)     (orders a <= 3)
// and of the floor min |Re q(x,u)|/|phi(u)|, with a log-log growth slope in
// |u| over the top decade of the grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symaudit/core.hpp"
#include "symaudit/symbol.hpp"

namespace symaudit {

struct EllipticityOptions {
  int max_order = 3;           // orders 0..max_order against (1 + u^2)
  int re_psi_max_order = 1;    // orders 0..re_psi_max_order against |Re psi|
  double base_step = 1e-3;     // first step h0 = base_step (1 + |x|)
  int halvings = 10;           // candidate steps h0 4^{-j}, j < halvings
  double unstable_tol = 1e-4;  // Richardson disagreement, in ratio units, relative to max(1, ratio)
  std::optional<double> L;
};

struct XDerivative {
  complex value;
  double disagreement = 0.0;  // |D(h/2) - D(h)| at the selected step
  double step = 0.0;
};

namespace detail {

inline complex central_stencil(const std::function<complex(double)>& q, double x, int order, double h) {
  switch (order) {
    case 0: return q(x);
    case 1: return (q(x + h) - q(x - h)) / (2.0 * h);
    case 2: return (q(x + h) - 2.0 * q(x) + q(x - h)) / (h * h);
    case 3: return (q(x + 2 * h) - 2.0 * q(x + h) + 2.0 * q(x - h) - q(x - 2 * h)) / (2.0 * h * h * h);
    default: throw DomainError("x-derivatives are available up to order 3");
  }
}

}  // namespace detail

/// Central differences with one Richardson halving. Candidate steps shrink by
/// 4 until the pair (h, h/2) with the smallest disagreement is found; the
/// symbol's x-scale can be as small as 1/|u|.
inline XDerivative x_derivative(const std::function<complex(double)>& q, double x, int order,
                                const EllipticityOptions& opt = {}) {
  if (order == 0) return {q(x), 0.0, 0.0};
  XDerivative best;
  bool have = false;
  double h = opt.base_step * (1.0 + std::abs(x));
  for (int j = 0; j < opt.halvings; ++j, h *= 0.25) {
    const complex d1 = detail::central_stencil(q, x, order, h);
    const complex d2 = detail::central_stencil(q, x, order, 0.5 * h);
    const double dis = std::abs(d2 - d1);
    if (!have || dis < best.disagreement) {
      best = {(4.0 * d2 - d1) / 3.0, dis, h};
      have = true;
    }
  }
  return best;
}

struct OrderAudit {
  int order = 0;
  std::optional<double> sup_re_psi_ratio;  // sup |d^order q|/|Re psi|
  std::optional<double> slope_re_psi;
  double sup_growth_ratio = 0.0;           // sup |d^order q|/(1+u^2)
  double slope_growth = 0.0;
  double argsup_x = 0.0, argsup_u = 0.0;   // for the Re psi ratio when present, else growth
};

struct EllipticityAudit {
  double x0 = 0.0;
  double radius = 0.0;
  std::vector<OrderAudit> orders;
  double floor_ratio = 0.0;  // min |Re q|/|phi| with phi = psi
  double max_disagreement = 0.0;
  std::optional<double> L;
  std::optional<bool> pass_re_psi;  // all Re psi ratios <= L
  std::optional<bool> pass_growth;  // all growth ratios <= L
};

/// Least-squares slope of log(value) against log|u| over |u| in [umax/10, umax].
inline double top_decade_slope(std::span<const double> abs_u, std::span<const double> values) {
  double umax = 0.0;
  for (double u : abs_u) umax = std::max(umax, u);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < abs_u.size(); ++i) {
    if (abs_u[i] < umax / 10.0 || !(values[i] > 0.0)) continue;
    const double lx = std::log(abs_u[i]), ly = std::log(values[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

/// psi is the reference exponent of the ellipticity floor and the Re psi
/// bound; u = 0 is skipped. The x grid is `nx` points on [x0 - radius, x0 + radius].
inline EllipticityAudit audit_ellipticity(const SymbolSpec& spec, const std::function<complex(double)>& psi,
                                          double x0, double radius, std::size_t nx,
                                          std::span<const double> ugrid, const EllipticityOptions& opt = {}) {
  EllipticityAudit audit;
  audit.x0 = x0;
  audit.radius = radius;
  audit.L = opt.L;
  const std::vector<double> xgrid = linspace(x0 - radius, x0 + radius, nx);

  // distinct |u| values, each audited at +u and -u when present
  std::vector<double> abs_u;
  for (double u : ugrid)
    if (u != 0.0) abs_u.push_back(std::abs(u));
  std::sort(abs_u.begin(), abs_u.end());
  abs_u.erase(std::unique(abs_u.begin(), abs_u.end()), abs_u.end());
  auto has = [&](double u) { return std::find(ugrid.begin(), ugrid.end(), u) != ugrid.end(); };

  const int orders = opt.max_order + 1;
  std::vector<std::vector<double>> sup_psi(orders, std::vector<double>(abs_u.size(), 0.0));
  std::vector<std::vector<double>> sup_grow(orders, std::vector<double>(abs_u.size(), 0.0));
  audit.orders.resize(orders);
  for (int o = 0; o < orders; ++o) {
    audit.orders[o].order = o;
    if (o <= opt.re_psi_max_order) audit.orders[o].sup_re_psi_ratio = 0.0;
  }
  bool first_floor = true;

  for (std::size_t iu = 0; iu < abs_u.size(); ++iu) {
    for (double u : {abs_u[iu], -abs_u[iu]}) {
      if (!has(u)) continue;
      const complex ps = psi(u);
      const double re_psi = std::abs(ps.real());
      const double growth = 1.0 + u * u;
      auto q_of_x = [&](double x) { return eval_symbol(spec, x, u); };
      for (double x : xgrid) {
        if (std::abs(ps) > 0.0) {
          const double fl = std::abs(eval_symbol(spec, x, u).real()) / std::abs(ps);
          audit.floor_ratio = first_floor ? fl : std::min(audit.floor_ratio, fl);
          first_floor = false;
        }
        for (int o = 0; o < orders; ++o) {
          const XDerivative d = x_derivative(q_of_x, x, o, opt);
          const double mag = std::abs(d.value);
          auto& row = audit.orders[o];
          double ratio_for_check = mag / growth;
          double dis_units = d.disagreement / growth;
          if (mag / growth > sup_grow[o][iu]) sup_grow[o][iu] = mag / growth;
          if (mag / growth > row.sup_growth_ratio) {
            row.sup_growth_ratio = mag / growth;
            if (!row.sup_re_psi_ratio) {
              row.argsup_x = x;
              row.argsup_u = u;
            }
          }
          if (row.sup_re_psi_ratio && re_psi > 0.0) {
            const double r = mag / re_psi;
            sup_psi[o][iu] = std::max(sup_psi[o][iu], r);
            if (r > *row.sup_re_psi_ratio) {
              row.sup_re_psi_ratio = r;
              row.argsup_x = x;
              row.argsup_u = u;
            }
            if (d.disagreement / re_psi > dis_units) {
              dis_units = d.disagreement / re_psi;
              ratio_for_check = r;
            }
          }
          audit.max_disagreement = std::max(audit.max_disagreement, dis_units);
          if (dis_units > opt.unstable_tol * std::max(1.0, ratio_for_check))
            throw DerivativeUnstable("Richardson disagreement " + fmt17(dis_units) + " at x = " + fmt17(x) +
                                     ", u = " + fmt17(u) + ", order " + std::to_string(o));
        }
      }
    }
  }
  for (int o = 0; o < orders; ++o) {
    auto& row = audit.orders[o];
    row.slope_growth = top_decade_slope(abs_u, sup_grow[o]);
    if (row.sup_re_psi_ratio) row.slope_re_psi = top_decade_slope(abs_u, sup_psi[o]);
  }
  if (opt.L) {
    bool p1 = true, p2 = true;
    for (const auto& row : audit.orders) {
      if (row.sup_re_psi_ratio && *row.sup_re_psi_ratio > *opt.L) p1 = false;
      if (row.sup_growth_ratio > *opt.L) p2 = false;
    }
    audit.pass_re_psi = p1;
    audit.pass_growth = p2;
  }
  return audit;
}

}  // namespace symaudit
