#pragma once

// Text formats: measure CSV, symbol/exponent JSON, simulation and estimator
// CSVs, and JSON views of the audit reports. Floats are written with 17
// significant digits, '.' separator and '\n' line ends.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symaudit/ellipticity.hpp"
#include "symaudit/estimators.hpp"
#include "symaudit/fourier_symbol.hpp"
#include "symaudit/groenwall.hpp"
#include "symaudit/majorant.hpp"
#include "symaudit/measure.hpp"
#include "symaudit/simulate.hpp"
#include "symaudit/symbol.hpp"

namespace symaudit {

using json = nlohmann::json;

// ---- measures -------------------------------------------------------------

inline void write_measure_csv(std::ostream& os, const Measure& mu) {
  os << "# unit=" << fmt17(mu.unit().value) << " tag=" << mu.unit().tag << '\n';
  os << "index,weight_re,weight_im\n";
  for (const auto& [j, w] : mu.atoms()) os << j << ',' << fmt17(w.real()) << ',' << fmt17(w.imag()) << '\n';
}

inline Measure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# unit=", 0) != 0) throw ParseError("missing '# unit=' metadata line");
  const auto tag_pos = line.find(" tag=");
  if (tag_pos == std::string::npos) throw ParseError("missing tag in metadata line");
  LatticeUnit unit;
  try {
    unit.value = std::stod(line.substr(7, tag_pos - 7));
  } catch (const std::exception&) {
    throw ParseError("bad unit value in '" + line + "'");
  }
  unit.tag = line.substr(tag_pos + 5);
  if (!std::getline(is, line) || line != "index,weight_re,weight_im") throw ParseError("bad measure CSV header");
  std::vector<Measure::Atom> atoms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ParseError("bad measure row '" + line + "'");
    try {
      atoms.emplace_back(std::stoll(a), complex{std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw ParseError("bad measure row '" + line + "'");
    }
  }
  return Measure(unit, std::move(atoms));
}

// ---- specs ----------------------------------------------------------------

inline json to_json(const LatticeUnit& u) { return {{"value", u.value}, {"tag", u.tag}}; }

inline LatticeUnit lattice_unit_from_json(const json& j) {
  if (j.is_string()) return parse_lattice_unit(j.get<std::string>());
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!(v > 0.0)) throw ParseError("lattice unit must be positive");
    return {v, fmt17(v)};
  }
  if (!j.is_object() || !j.contains("tag")) throw ParseError("lattice unit needs a tag");
  LatticeUnit u = parse_lattice_unit(j.at("tag").get<std::string>());
  if (j.contains("value")) {
    const double v = j.at("value").get<double>();
    if (std::abs(v - u.value) > 1e-15 * u.value)
      throw ParseError("lattice unit value " + fmt17(v) + " does not match tag " + u.tag);
  }
  return u;
}

inline json to_json(const LevyTriplet& t) {
  json jumps = json::array();
  for (const auto& a : t.jumps) jumps.push_back({{"location", a.location}, {"rate", a.rate}});
  return {{"drift", t.drift}, {"diffusion", t.diffusion}, {"jumps", jumps}};
}

inline json to_json(const ExponentSpec& psi) {
  if (std::holds_alternative<BrownianNeg>(psi)) return {{"variant", "brownian_neg"}};
  json j = to_json(std::get<TripletExponent>(psi).triplet);
  j["variant"] = "triplet";
  return j;
}

inline ExponentSpec exponent_from_json(const json& j) {
  try {
    const std::string v = j.at("variant").get<std::string>();
    if (v == "brownian_neg") return BrownianNeg{};
    if (v == "triplet") {
      LevyTriplet t;
      t.drift = j.value("drift", 0.0);
      t.diffusion = j.value("diffusion", 0.0);
      if (j.contains("jumps"))
        for (const auto& a : j.at("jumps")) t.jumps.push_back({a.at("location").get<double>(), a.at("rate").get<double>()});
      validate(t);
      return TripletExponent{t};
    }
    throw ParseError("unknown exponent variant '" + v + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad exponent JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

inline json to_json(const SymbolSpec& spec) {
  json j{{"variant", variant_name(spec)}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ex31Approx> || std::is_same_v<T, Ex32Approx>) {
          j["k"] = to_json(s.k);
          j["n"] = s.n;
        } else if constexpr (std::is_same_v<T, ProductCosine> || std::is_same_v<T, ConstantSymbol>) {
          j["psi"] = to_json(s.psi);
        } else if constexpr (std::is_same_v<T, TripletField>) {
          j["label"] = s.label;
        }
      },
      spec);
  return j;
}

inline SymbolSpec symbol_from_json(const json& j) {
  try {
    const std::string v = j.at("variant").get<std::string>();
    if (v == "ex31") return Ex31{};
    if (v == "ex32") return Ex32{};
    if (v == "ex31approx" || v == "ex32approx") {
      const LatticeUnit k = lattice_unit_from_json(j.at("k"));
      const int n = j.at("n").get<int>();
      if (n < 0 || n > 60) throw ParseError("n must lie in [0, 60]");
      if (v == "ex31approx") return Ex31Approx{k, n};
      return Ex32Approx{k, n};
    }
    if (v == "prodcos") return ProductCosine{exponent_from_json(j.at("psi"))};
    if (v == "constant") return ConstantSymbol{exponent_from_json(j.at("psi"))};
    if (v == "triplet_field") throw UnsupportedSpec("triplet_field symbols carry code and cannot be read from JSON");
    throw ParseError("unknown symbol variant '" + v + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad symbol JSON: ") + e.what());
  }
}

// ---- simulation output ------------------------------------------------------

inline void write_endpoint_csv(std::ostream& os, const EnsembleResult& e) {
  os << "path_index,t,value\n";
  for (std::size_t i = 0; i < e.endpoints.size(); ++i)
    os << i << ',' << fmt17(e.horizon) << ',' << fmt17(e.unit.value * e.endpoints[i].to_double()) << '\n';
}

/// One row per state, the initial state at jump_time 0.
inline void write_path_csv(std::ostream& os, std::span<const Path> paths) {
  os << "path_index,jump_time,value_after\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Path& path = paths[p];
    for (std::size_t i = 0; i < path.states.size(); ++i) {
      const double t = i == 0 ? 0.0 : path.times[i - 1];
      os << p << ',' << fmt17(t) << ',' << fmt17(path.unit.value * path.states[i].to_double()) << '\n';
    }
  }
}

inline json to_json(const SimConfig& c) {
  return {{"horizon", c.horizon},     {"seed", c.seed},       {"max_events", c.max_events},
          {"paths", c.paths},         {"threads", c.threads}, {"retain_paths", c.retain_paths}};
}

inline json simulation_sidecar(const SymbolSpec& spec, const SimConfig& cfg, const EnsembleResult& e) {
  return {{"spec", to_json(spec)},
          {"config", to_json(cfg)},
          {"seed", cfg.seed},
          {"truncated_paths", e.truncated_paths},
          {"total_events", e.total_events}};
}

// ---- estimator output -------------------------------------------------------

struct MomentRow {
  int order = 0;
  MeanEstimate mc;
  double closed_form = 0.0;
  double tolerance = 0.0;

  double abs_error() const { return std::abs(mc.mean - closed_form); }
  bool pass() const { return abs_error() <= tolerance; }
};

inline void write_moment_csv(std::ostream& os, std::span<const MomentRow> rows) {
  os << "order,mc_mean,mc_se,closed_form,abs_error,pass\n";
  for (const auto& r : rows)
    os << r.order << ',' << fmt17(r.mc.mean) << ',' << fmt17(r.mc.se) << ',' << fmt17(r.closed_form) << ','
       << fmt17(r.abs_error()) << ',' << (r.pass() ? "true" : "false") << '\n';
}

inline void write_ecf_csv(std::ostream& os, const EcfDistance& d) {
  os << "u,re_a,im_a,re_b,im_b,weighted_abs_diff\n";
  for (const auto& c : d.contributions)
    os << fmt17(c.u) << ',' << fmt17(c.a.real()) << ',' << fmt17(c.a.imag()) << ',' << fmt17(c.b.real()) << ','
       << fmt17(c.b.imag()) << ',' << fmt17(c.weighted_abs_diff) << '\n';
}

inline json to_json(const MomentRow& r) {
  return {{"order", r.order},         {"mc_mean", r.mc.mean},        {"mc_se", r.mc.se},
          {"closed_form", r.closed_form}, {"abs_error", r.abs_error()}, {"tolerance", r.tolerance},
          {"pass", r.pass()}};
}

inline json to_json(const EcfDistance& d) {
  return {{"d", d.d}, {"u_star", d.u_star}, {"se_bound", d.se_bound}};
}

inline json to_json(const SupportAudit& a) {
  return {{"total", a.total}, {"nonzero", a.nonzero}, {"off_lattice", a.off_lattice}};
}

// ---- audit reports ---------------------------------------------------------

inline json complex_json(complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const DominanceReport& r) {
  return {{"min_margin", r.min_margin}, {"u_at_min", r.u_at_min}, {"worst_slack", r.worst_slack},
          {"pass", r.pass},             {"points", r.points.size()}};
}

inline json to_json(const KReport& r) {
  return {{"K", r.K},
          {"u_star", r.u_star},
          {"max_index", r.max_index},
          {"edge_share", r.edge_share},
          {"points", r.points.size()}};
}

inline json to_json(const MajorantReport& r) {
  return {{"a0_tilde", complex_json(r.a0_tilde)},
          {"factors", r.factors},
          {"condition1_residual", r.condition1_residual},
          {"weighted_mass", r.weighted_mass},
          {"k_sigma", r.k_sigma},
          {"k_sigma_normalized", r.k_sigma_normalized},
          {"condition2_bound", r.condition2_bound},
          {"tv", r.tv},
          {"second_moment_sum", r.second_moment_sum},
          {"uncentred_factors", r.uncentred_factors},
          {"atoms", r.measure.size()},
          {"condition1", r.condition1},
          {"condition2", r.condition2}};
}

inline json to_json(const TermReport& r) {
  return {{"hypothesis", r.hypothesis},
          {"fourier_residual", r.fourier_residual},
          {"tv", r.tv},
          {"first_abs_moment", r.first_abs_moment},
          {"second_abs_moment", r.second_abs_moment},
          {"second_moment_bound", r.second_moment_bound},
          {"pass", r.all_ok()}};
}

inline json to_json(const EllipticityAudit& a) {
  json orders = json::array();
  for (const auto& o : a.orders) {
    json row{{"order", o.order},
             {"sup_growth_ratio", o.sup_growth_ratio},
             {"slope_growth", o.slope_growth},
             {"argsup_x", o.argsup_x},
             {"argsup_u", o.argsup_u}};
    if (o.sup_re_psi_ratio) row["sup_re_psi_ratio"] = *o.sup_re_psi_ratio;
    if (o.slope_re_psi) row["slope_re_psi"] = *o.slope_re_psi;
    orders.push_back(row);
  }
  json j{{"x0", a.x0},
         {"radius", a.radius},
         {"orders", orders},
         {"floor_ratio", a.floor_ratio},
         {"max_disagreement", a.max_disagreement}};
  if (a.L) j["L"] = *a.L;
  if (a.pass_re_psi) j["pass_re_psi"] = *a.pass_re_psi;
  if (a.pass_growth) j["pass_growth"] = *a.pass_growth;
  return j;
}

inline json to_json(const GroenwallReport& r) {
  auto viol = [](const std::optional<GroenwallViolation>& v) -> json {
    if (!v) return nullptr;
    return {{"i", v->i}, {"j", v->j}, {"lhs", v->lhs}, {"rhs", v->rhs}};
  };
  return {{"hypothesis", r.hypothesis},
          {"conclusion", r.conclusion},
          {"first_hypothesis_violation", viol(r.first_hypothesis_violation)},
          {"first_conclusion_violation", viol(r.first_conclusion_violation)},
          {"max_conclusion_ratio", r.max_conclusion_ratio},
          {"max_abs", r.max_abs}};
}

inline void write_margin_csv(std::ostream& os, const DominanceReport& r) {
  os << "u,margin\n";
  for (const auto& p : r.points) os << fmt17(p.u) << ',' << fmt17(p.margin) << '\n';
}

inline void write_k_csv(std::ostream& os, const KReport& r) {
  os << "u,K_integrand\n";
  for (const auto& p : r.points) os << fmt17(p.u) << ',' << fmt17(p.integrand) << '\n';
}

/// Reads `t,phi` rows (a header line is skipped when present).
inline GroenwallTable read_table_csv(std::istream& is) {
  GroenwallTable tab;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) throw ParseError("bad table row '" + line + "'");
    try {
      const double t = std::stod(a), p = std::stod(b);
      tab.t.push_back(t);
      tab.phi.push_back(p);
    } catch (const std::exception&) {
      if (!first) throw ParseError("bad table row '" + line + "'");
    }
    first = false;
  }
  return tab;
}

inline void write_table_csv(std::ostream& os, const GroenwallTable& tab) {
  os << "t,phi\n";
  for (std::size_t i = 0; i < tab.t.size(); ++i) os << fmt17(tab.t[i]) << ',' << fmt17(tab.phi[i]) << '\n';
}

}  // namespace symaudit
