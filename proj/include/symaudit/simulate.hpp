#pragma once

// Exact continuous-time simulation of finite-activity pure-jump dynamics on a
// dyadic lattice: exponential holding times at the state's total rate, jumps
// picked in proportion to their rates.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <thread>
#include <variant>
#include <vector>

#include "symaudit/exact_state.hpp"
#include "symaudit/rng.hpp"
#include "symaudit/symbol.hpp"

namespace symaudit {

struct Jump {
  double rate = 0.0;
  Dyadic displacement;  // in units of k
};

template <class R>
concept JumpRule = requires(const R& r, const Dyadic& s, std::vector<Jump>& out) {
  r.jumps(s, out);
  { r.unit() } -> std::convertible_to<const LatticeUnit&>;
};

/// Approximation of Ex31: from x != 0 jump to 2x or 0, each at rate 1/(2x^2);
/// below k 2^-n jump by +-k 2^-n, each at rate 4^n/(2k^2).
class Ex31ApproxRule {
 public:
  Ex31ApproxRule(LatticeUnit k, int n) : k_(std::move(k)), n_(n), floor_(Dyadic::pow2(n)) {
    inner_rate_ = 0.5 * std::ldexp(1.0, 2 * n) / (k_.value * k_.value);
  }

  void jumps(const Dyadic& s, std::vector<Jump>& out) const {
    out.clear();
    const Dyadic mag = s.mantissa < 0 ? -s : s;
    if (compare(mag, floor_) >= 0) {
      const double x = k_.value * s.to_double();
      const double r = 0.5 / (x * x);
      out.push_back({r, s});
      out.push_back({r, -s});
    } else {
      out.push_back({inner_rate_, floor_});
      out.push_back({inner_rate_, -floor_});
    }
  }

  const LatticeUnit& unit() const { return k_; }
  int n() const { return n_; }

 private:
  LatticeUnit k_;
  int n_;
  Dyadic floor_;
  double inner_rate_;
};

/// Approximation of Ex32: one jump by +h(x) at rate 1/h(x),
/// h(x) = (x v k 2^-n) ^ k 2^n.
class Ex32ApproxRule {
 public:
  Ex32ApproxRule(LatticeUnit k, int n)
      : k_(std::move(k)), n_(n), lo_(Dyadic::pow2(n)), hi_(Dyadic::pow2(-n)) {}

  void jumps(const Dyadic& s, std::vector<Jump>& out) const {
    out.clear();
    Dyadic h = s;
    if (compare(s, lo_) < 0) h = lo_;
    else if (compare(s, hi_) > 0) h = hi_;
    out.push_back({1.0 / (k_.value * h.to_double()), h});
  }

  const LatticeUnit& unit() const { return k_; }
  int n() const { return n_; }

 private:
  LatticeUnit k_;
  int n_;
  Dyadic lo_, hi_;
};

/// Arbitrary user rule.
struct FunctionRule {
  LatticeUnit lattice;
  std::function<void(const Dyadic&, std::vector<Jump>&)> fn;

  void jumps(const Dyadic& s, std::vector<Jump>& out) const {
    out.clear();
    fn(s, out);
  }
  const LatticeUnit& unit() const { return lattice; }
};

class ApproxRule {
 public:
  explicit ApproxRule(Ex31ApproxRule r) : rule_(std::move(r)) {}
  explicit ApproxRule(Ex32ApproxRule r) : rule_(std::move(r)) {}

  void jumps(const Dyadic& s, std::vector<Jump>& out) const {
    std::visit([&](const auto& r) { r.jumps(s, out); }, rule_);
  }
  const LatticeUnit& unit() const {
    return std::visit([](const auto& r) -> const LatticeUnit& { return r.unit(); }, rule_);
  }
  bool is_ex31() const { return std::holds_alternative<Ex31ApproxRule>(rule_); }
  int n() const {
    return std::visit([](const auto& r) { return r.n(); }, rule_);
  }

 private:
  std::variant<Ex31ApproxRule, Ex32ApproxRule> rule_;
};

inline ApproxRule jump_rule_of(const SymbolSpec& spec) {
  if (const auto* s = std::get_if<Ex31Approx>(&spec)) return ApproxRule(Ex31ApproxRule(s->k, s->n));
  if (const auto* s = std::get_if<Ex32Approx>(&spec)) return ApproxRule(Ex32ApproxRule(s->k, s->n));
  throw UnsupportedSpec("jump rules exist only for ex31approx and ex32approx, not " + variant_name(spec));
}

/// Reachable set of the approximation's paths.
inline Lattice lattice_of(const ApproxRule& rule) {
  return {rule.unit(), rule.is_ex31() ? LatticeKind::power_of_two : LatticeKind::ex32_reachable,
          rule.n()};
}

struct SimConfig {
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 10'000'000;
  std::size_t paths = 1;
  unsigned threads = 0;         // 0: hardware concurrency
  std::size_t retain_paths = 0;  // full paths kept by simulate_ensemble
};

inline void validate(const SimConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw DomainError("horizon must be positive");
  if (cfg.paths < 1) throw DomainError("need at least one path");
  if (cfg.max_events < 1) throw DomainError("max_events must be positive");
}

/// Cadlag step path: states[0] holds on [0, times[0]), states[i] from times[i-1].
struct Path {
  LatticeUnit unit;
  std::vector<double> times;
  std::vector<Dyadic> states;
  bool truncated = false;  // stopped by the event budget before the horizon

  const Dyadic& endpoint() const { return states.back(); }
  std::size_t jumps() const { return times.size(); }
};

namespace detail {

struct PathOutcome {
  Dyadic endpoint;
  std::uint64_t events = 0;
  bool truncated = false;
};

template <JumpRule R>
PathOutcome run_path(const R& rule, Dyadic x, const SimConfig& cfg, std::uint64_t path_index,
                     std::vector<Jump>& buf, Path* record) {
  CounterStream rng(cfg.seed, path_index);
  double t = 0.0;
  PathOutcome out;
  for (;;) {
    rule.jumps(x, buf);
    double total = 0.0;
    for (const auto& j : buf) total += j.rate;
    if (!(total > 0.0)) break;
    t += -std::log(rng.uniform_open_left()) / total;
    if (t > cfg.horizon) break;
    if (out.events == cfg.max_events) {
      out.truncated = true;
      break;
    }
    double pick = rng.uniform_open_left() * total;
    std::size_t chosen = buf.size() - 1;
    for (std::size_t i = 0; i + 1 < buf.size(); ++i) {
      if (pick <= buf[i].rate) {
        chosen = i;
        break;
      }
      pick -= buf[i].rate;
    }
    x = x + buf[chosen].displacement;
    ++out.events;
    if (record) {
      record->times.push_back(t);
      record->states.push_back(x);
    }
  }
  out.endpoint = x;
  if (record) record->truncated = out.truncated;
  return out;
}

}  // namespace detail

/// Path number `path_index` of the ensemble defined by cfg.seed.
template <JumpRule R>
Path simulate_path(const R& rule, const Dyadic& x0, const SimConfig& cfg, std::uint64_t path_index = 0) {
  validate(cfg);
  Path p;
  p.unit = rule.unit();
  p.states.push_back(x0);
  std::vector<Jump> buf;
  detail::run_path(rule, x0, cfg, path_index, buf, &p);
  return p;
}

struct EnsembleResult {
  LatticeUnit unit;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<Dyadic> endpoints;
  std::vector<Path> retained;  // paths 0 .. retain_paths-1
  std::size_t truncated_paths = 0;
  std::uint64_t total_events = 0;
};

/// N independent endpoints X(T). Path i always uses stream i of cfg.seed, so
/// the result is bit-identical for any thread count.
template <JumpRule R>
EnsembleResult simulate_ensemble(const R& rule, const Dyadic& x0, const SimConfig& cfg) {
  validate(cfg);
  EnsembleResult res;
  res.unit = rule.unit();
  res.horizon = cfg.horizon;
  res.seed = cfg.seed;
  res.endpoints.resize(cfg.paths);
  const std::size_t keep = std::min(cfg.retain_paths, cfg.paths);
  res.retained.resize(keep);

  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.paths));
  std::vector<std::size_t> truncated(workers, 0);
  std::vector<std::uint64_t> events(workers, 0);

  auto work = [&](unsigned w) {
    std::vector<Jump> buf;
    for (std::size_t i = w; i < cfg.paths; i += workers) {
      Path* rec = nullptr;
      if (i < keep) {
        rec = &res.retained[i];
        rec->unit = rule.unit();
        rec->states.push_back(x0);
      }
      const auto o = detail::run_path(rule, x0, cfg, i, buf, rec);
      res.endpoints[i] = o.endpoint;
      truncated[w] += o.truncated;
      events[w] += o.events;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (unsigned w = 0; w < workers; ++w) {
    res.truncated_paths += truncated[w];
    res.total_events += events[w];
  }
  return res;
}

}  // namespace symaudit
