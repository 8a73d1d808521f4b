#pragma once

// Discrete check of the perturbed Groenwall argument: given a table phi(t_i),
// verify the one-step hypothesis
//   phi(t_j) <= (1 + (t_j - t_i) c) phi(t_i) + beta(t_j - t_i)   for all i < j
// and the conclusion phi(t_i) <= phi(0) e^{c t_i}.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symaudit/core.hpp"

namespace symaudit {

struct GroenwallViolation {
  std::size_t i = 0, j = 0;  // j is the later index; i == j for the conclusion
  double lhs = 0.0, rhs = 0.0;
};

struct GroenwallReport {
  bool hypothesis = true;
  bool conclusion = true;
  std::optional<GroenwallViolation> first_hypothesis_violation;
  std::optional<GroenwallViolation> first_conclusion_violation;
  double max_conclusion_ratio = 0.0;  // max phi(t_i)/(phi(0) e^{c t_i}) where phi(0) > 0
  double max_abs = 0.0;
};

inline constexpr double kGroenwallRelTol = 1e-12;

inline GroenwallReport groenwall_verify(std::span<const double> t, std::span<const double> phi, double c,
                                        const std::function<double(double)>& beta) {
  if (t.size() != phi.size() || t.empty()) throw DomainError("t and phi tables must be nonempty and equal length");
  if (!(c > 0.0)) throw DomainError("c must be positive");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw DomainError("t must be strictly increasing");

  GroenwallReport rep;
  for (std::size_t j = 0; j < t.size(); ++j) {
    rep.max_abs = std::max(rep.max_abs, std::abs(phi[j]));
    for (std::size_t i = 0; i < j; ++i) {
      const double d = t[j] - t[i];
      const double rhs = (1.0 + d * c) * phi[i] + beta(d);
      if (phi[j] > rhs && rep.hypothesis) {
        rep.hypothesis = false;
        rep.first_hypothesis_violation = GroenwallViolation{i, j, phi[j], rhs};
      }
    }
    const double bound = phi[0] * std::exp(c * (t[j] - t[0]));
    const double rhs = bound * (1.0 + kGroenwallRelTol);
    if (phi[j] > rhs && rep.conclusion) {
      rep.conclusion = false;
      rep.first_conclusion_violation = GroenwallViolation{j, j, phi[j], rhs};
    }
    if (bound > 0.0) rep.max_conclusion_ratio = std::max(rep.max_conclusion_ratio, phi[j] / bound);
  }
  return rep;
}

struct GroenwallTable {
  std::vector<double> t;
  std::vector<double> phi;
};

/// phi((n+1) T/N) = (1 + T c/N) phi(n T/N) + beta(T/N), n = 0..N-1.
inline GroenwallTable groenwall_recursion_table(double phi0, double c, double T, std::size_t N,
                                                const std::function<double(double)>& beta) {
  if (N == 0) throw DomainError("need at least one step");
  GroenwallTable tab;
  tab.t.reserve(N + 1);
  tab.phi.reserve(N + 1);
  const double h = T / static_cast<double>(N);
  tab.t.push_back(0.0);
  tab.phi.push_back(phi0);
  for (std::size_t n = 0; n < N; ++n) {
    tab.t.push_back(T * static_cast<double>(n + 1) / static_cast<double>(N));
    tab.phi.push_back((1.0 + h * c) * tab.phi.back() + beta(h));
  }
  return tab;
}

/// beta(d) = scale (e^{c d} - 1 - c d): the o(d) slack that lets an exactly
/// exponential or recursion-generated table meet the hypothesis for
/// multi-step pairs when scale >= max phi.
inline std::function<double(double)> exponential_slack(double c, double scale) {
  return [c, scale](double d) { return scale * std::expm1(c * d) - scale * c * d; };
}

}  // namespace symaudit
