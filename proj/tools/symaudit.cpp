// symaudit: batch front-end for the simulation, estimation and audit modules.
// Exit codes: 0 pass, 2 failed check, 3 input error, 4 numeric budget.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symaudit/symaudit.hpp"

namespace fs = std::filesystem;
using namespace symaudit;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kPass = 0, kCheckFailed = 2, kInputError = 3, kBudget = 4 };

int exit_code_of(const Error& e) {
  const std::string k = e.kind();
  if (k == "BudgetExceeded" || k == "RepresentationOverflow" || k == "QuadratureUnderresolved" ||
      k == "DerivativeUnstable")
    return kBudget;
  if (k == "ViolatedDominance") return kCheckFailed;
  return kInputError;
}

struct Run {
  std::string command;
  std::vector<std::string> argv;
  fs::path out_dir = ".";
  json options = json::object();
  json checks = json::array();
  json result = json::object();
  std::vector<std::string> artifacts;
  std::optional<std::uint64_t> seed;

  void check(const std::string& name, bool pass, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(std::move(detail));
  }
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("pass").get<bool>(); });
  }
  std::ofstream open(const std::string& name) {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / name, std::ios::binary);
    if (!os) throw ParseError("cannot write " + (out_dir / name).string());
    artifacts.push_back(name);
    return os;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  json manifest(const std::string& status, int code) const {
    json m{{"command", command},
           {"argv", argv},
           {"options", options},
           {"status", status},
           {"exit_code", code},
           {"artifacts", artifacts},
           {"versions",
            {{"symaudit", kVersion},
             {"compiler", __VERSION__},
             {"cli11", CLI11_VERSION},
             {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
    if (seed) m["seed"] = *seed;
    return m;
  }
};

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("bad number '" + tok + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

std::vector<std::string> parse_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

SymbolSpec approx_spec(const std::string& name, const LatticeUnit& k, int n) {
  if (n < 0 || n > 60) throw ParseError("n must lie in [0, 60]");
  if (name == "ex31approx") return Ex31Approx{k, n};
  if (name == "ex32approx") return Ex32Approx{k, n};
  throw ParseError("simulation needs ex31approx or ex32approx, got '" + name + "'");
}

SymbolSpec named_spec(const std::string& name, const std::string& k, int n, const std::string& spec_json) {
  if (!spec_json.empty()) {
    std::ifstream is(spec_json);
    if (!is) throw ParseError("cannot read " + spec_json);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad JSON in ") + spec_json + ": " + e.what());
    }
    return symbol_from_json(j);
  }
  if (name == "ex31") return Ex31{};
  if (name == "ex32") return Ex32{};
  if (name == "prodcos") return ProductCosine{BrownianNeg{}};
  if (name == "constant") return ConstantSymbol{BrownianNeg{}};
  return approx_spec(name, parse_lattice_unit(k), n);
}

Example example_of(const SymbolSpec& s) {
  return std::holds_alternative<Ex31Approx>(s) ? Example::ex31 : Example::ex32;
}

// ---- subcommands ---------------------------------------------------------------

struct SimulateArgs {
  std::string spec = "ex31approx", k = "1", svg, svg_k;
  int n = 10;
  double t = 1.0, x0 = 0.0;
  std::size_t paths = 1, retain = 10;
  std::uint64_t seed = 0, max_events = 10'000'000;
  unsigned threads = 0;
  bool paths_csv = false, log_y = false;
};

void cmd_simulate(Run& run, const SimulateArgs& a) {
  const LatticeUnit k = parse_lattice_unit(a.k);
  const SymbolSpec spec = approx_spec(a.spec, k, a.n);
  SimConfig cfg;
  cfg.horizon = a.t;
  cfg.seed = a.seed;
  cfg.paths = a.paths;
  cfg.threads = a.threads;
  cfg.max_events = a.max_events;
  cfg.retain_paths = std::min(a.retain, a.paths);
  run.seed = a.seed;
  const Dyadic x0 = Dyadic::from_double(a.x0);
  const ApproxRule rule = jump_rule_of(spec);
  const EnsembleResult e = simulate_ensemble(rule, x0, cfg);
  { auto os = run.open("endpoints.csv"); write_endpoint_csv(os, e); }
  if (a.paths_csv) { auto os = run.open("paths.csv"); write_path_csv(os, e.retained); }
  run.write_json("simulation.json", simulation_sidecar(spec, cfg, e));

  if (!a.svg.empty()) {
    std::vector<SvgSeries> series;
    const std::vector<std::string> ks = a.svg_k.empty() ? std::vector<std::string>{} : parse_tokens(a.svg_k);
    if (ks.size() > 3) throw ParseError("at most 3 k values may be plotted");
    if (ks.empty()) {
      for (std::size_t i = 0; i < std::min<std::size_t>(3, e.retained.size()); ++i)
        series.push_back({e.retained[i], "k=" + k.tag + " path " + std::to_string(i)});
    } else {
      for (const auto& tok : ks) {
        const LatticeUnit kk = parse_lattice_unit(tok);
        for (const auto& s : series)
          if (s.path.unit.tag == kk.tag) throw ParseError("plotted k values must be distinct");
        const SymbolSpec sk = approx_spec(a.spec, kk, a.n);
        series.push_back({simulate_path(jump_rule_of(sk), x0, cfg, 0), "k=" + kk.tag});
      }
    }
    SvgOptions opt;
    opt.log_y = a.log_y;
    opt.title = variant_name(spec) + " n=" + std::to_string(a.n);
    fs::create_directories(run.out_dir);
    const fs::path svg_path = fs::path(a.svg).is_absolute() ? fs::path(a.svg) : run.out_dir / a.svg;
    std::ofstream os(svg_path, std::ios::binary);
    if (!os) throw ParseError("cannot write " + svg_path.string());
    write_paths_svg(os, series, a.t, opt);
    run.artifacts.push_back(svg_path.string());
  }
  run.result = {{"paths", e.endpoints.size()}, {"truncated_paths", e.truncated_paths}, {"total_events", e.total_events}};
  if (e.truncated_paths > 0)
    throw BudgetExceeded(std::to_string(e.truncated_paths) + " paths hit the event budget before the horizon");
}

struct MomentsArgs {
  std::string spec = "ex31approx", k = "1", orders = "2,4";
  int n = 10;
  double t = 1.0;
  std::size_t paths = 50000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

std::vector<MomentRow> moment_rows(const Sample& s, Example ex, const std::vector<int>& orders, double t) {
  std::vector<MomentRow> rows;
  for (int p : orders) {
    if (p < 1) throw ParseError("moment orders must be positive");
    MomentRow r;
    r.order = p;
    r.mc = moment_ci(s, p);
    r.closed_form = closed_moment(ex, p, t);
    r.tolerance = moment_tolerance(ex, p, r.mc.se);
    rows.push_back(r);
  }
  return rows;
}

void cmd_moments(Run& run, const MomentsArgs& a) {
  const SymbolSpec spec = approx_spec(a.spec, parse_lattice_unit(a.k), a.n);
  std::vector<int> orders;
  for (double v : parse_doubles(a.orders)) {
    if (v != std::floor(v)) throw ParseError("moment orders must be integers");
    orders.push_back(static_cast<int>(v));
  }
  SimConfig cfg;
  cfg.horizon = a.t;
  cfg.seed = a.seed;
  cfg.paths = a.paths;
  cfg.threads = a.threads;
  run.seed = a.seed;
  const EnsembleResult e = simulate_ensemble(jump_rule_of(spec), Dyadic::zero(), cfg);
  if (e.truncated_paths) throw BudgetExceeded("event budget exhausted on some paths");
  const auto rows = moment_rows(Sample::from_ensemble(e), example_of(spec), orders, a.t);
  { auto os = run.open("moments.csv"); write_moment_csv(os, rows); }
  json jr = json::array();
  for (const auto& r : rows) {
    jr.push_back(to_json(r));
    run.check("moment_" + std::to_string(r.order), r.pass(), to_json(r));
  }
  run.result = {{"spec", to_json(spec)}, {"rows", jr}};
}

struct NonuniqArgs {
  std::string ka = "1", kb = "sqrt2";
  int n = 10;
  double t = 1.0, threshold = 10.0;
  std::size_t paths = 50000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

void cmd_nonuniq(Run& run, const NonuniqArgs& a) {
  const LatticeUnit k1 = parse_lattice_unit(a.ka), k2 = parse_lattice_unit(a.kb);
  if (k1.tag == k2.tag) throw ParseError("the two lattice units must carry different tags");
  run.seed = a.seed;
  auto ensemble = [&](const LatticeUnit& k, std::uint64_t seed) {
    SimConfig cfg;
    cfg.horizon = a.t;
    cfg.seed = seed;
    cfg.paths = a.paths;
    cfg.threads = a.threads;
    const EnsembleResult e = simulate_ensemble(jump_rule_of(Ex31Approx{k, a.n}), Dyadic::zero(), cfg);
    if (e.truncated_paths) throw BudgetExceeded("event budget exhausted on some paths");
    return e;
  };
  const EnsembleResult e1 = ensemble(k1, a.seed), e2 = ensemble(k2, mix64(a.seed ^ 0xA5A5A5A5A5A5A5A5ULL));
  const Sample s1 = Sample::from_ensemble(e1, "k=" + k1.tag), s2 = Sample::from_ensemble(e2, "k=" + k2.tag);
  const Lattice l1{k1, LatticeKind::power_of_two, a.n}, l2{k2, LatticeKind::power_of_two, a.n};
  const SupportAudit own1 = support_audit(s1, l1), own2 = support_audit(s2, l2);
  const SupportAudit cross1 = support_audit(s1, l2), cross2 = support_audit(s2, l1);
  run.check("own_lattice_a", own1.off_lattice == 0, to_json(own1));
  run.check("own_lattice_b", own2.off_lattice == 0, to_json(own2));
  run.check("cross_lattice_a", cross1.off_lattice == cross1.nonzero, to_json(cross1));
  run.check("cross_lattice_b", cross2.off_lattice == cross2.nonzero, to_json(cross2));

  const auto r1 = moment_rows(s1, Example::ex31, {2}, a.t), r2 = moment_rows(s2, Example::ex31, {2}, a.t);
  const double diff = std::abs(r1[0].mc.mean - r2[0].mc.mean), tol = 3.0 * (r1[0].mc.se + r2[0].mc.se);
  run.check("second_moments_agree", diff <= tol, {{"abs_diff", diff}, {"tolerance", tol}});
  {
    auto os = run.open("moments.csv");
    std::vector<MomentRow> both{r1[0], r2[0]};
    write_moment_csv(os, both);
  }
  const EcfDistance d = ecf_distance(s1, s2, default_ugrid());
  { auto os = run.open("ecf.csv"); write_ecf_csv(os, d); }
  run.check("ecf_distance", d.d > a.threshold * d.se_bound,
            {{"d", d.d}, {"se_bound", d.se_bound}, {"threshold", a.threshold}, {"u_star", d.u_star}});
  run.result = {{"support", {{"a_own", to_json(own1)}, {"b_own", to_json(own2)}, {"a_vs_b", to_json(cross1)},
                             {"b_vs_a", to_json(cross2)}}},
                {"second_moment", {to_json(r1[0]), to_json(r2[0])}},
                {"ecf_distance", to_json(d)}};
}

struct SelftestArgs {
  std::size_t count = 500, terms = 200;
  std::uint64_t seed = 42;
};

void cmd_measure_selftest(Run& run, const SelftestArgs& a) {
  run.seed = a.seed;
  const SweepReport laws = measure_algebra_sweep(a.count, a.seed);
  json props = json::array();
  for (const auto& p : laws.properties) {
    json row{{"worst", p.worst}, {"tolerance", p.tolerance}, {"cases", p.cases}};
    run.check(p.name, p.pass(), row);
    row["name"] = p.name;
    props.push_back(row);
  }
  const TermSweepReport terms = term_measure_sweep(a.terms, a.seed);
  run.check("term_measures", terms.pass(),
            {{"cases", terms.cases.size()},
             {"failures", terms.failures},
             {"worst_fourier", terms.worst_fourier},
             {"worst_tv_excess", terms.worst_tv_excess},
             {"worst_first", terms.worst_first},
             {"worst_second_excess", terms.worst_second_excess}});
  run.result = {{"algebra", props}, {"term_cases", terms.cases.size()}};
  run.write_json("selftest.json", {{"checks", run.checks}});
}

struct FourierArgs {
  std::string symbol = "prodcos", us = "0.5,1,5,20", ts = "0.1,0.5,1", k_range;
  double x0 = 0.0;
  int ell = 1, nmax = 64, quadrature = 4096, ncut = -1;
  bool csv = false;
};

void cmd_fourier_check(Run& run, const FourierArgs& a) {
  FourierSymbol fs;
  if (a.symbol == "prodcos") {
    fs = fourier_symbol_of_product_cosine(BrownianNeg{});
  } else if (a.symbol == "localized") {
    LocalizeOptions opt;
    opt.nmax = a.nmax;
    opt.quadrature_points = a.quadrature;
    fs = localize_fourierize(ProductCosine{BrownianNeg{}}, a.x0, a.ell, opt);
  } else {
    throw ParseError("fourier-check supports prodcos or localized, got '" + a.symbol + "'");
  }
  const auto ugrid = default_ugrid();
  const DominanceReport dom = check_dominance(fs, ugrid);
  const KReport K = compute_K(fs, ugrid);
  run.check("dominance", dom.pass, to_json(dom));
  if (!a.k_range.empty()) {
    const auto r = parse_doubles(a.k_range);
    if (r.size() != 2) throw ParseError("--k-range takes lo,hi");
    run.check("K_range", K.K >= r[0] && K.K <= r[1], {{"K", K.K}, {"lo", r[0]}, {"hi", r[1]}});
  }
  if (a.csv) {
    { auto os = run.open("margin.csv"); write_margin_csv(os, dom); }
    { auto os = run.open("K.csv"); write_k_csv(os, K); }
  }
  const int ncut = a.ncut >= 0 ? a.ncut : (a.symbol == "prodcos" ? 1 : a.nmax);
  const auto xgrid = linspace(-pi, pi, 101);
  json maj = json::array();
  for (double u : parse_doubles(a.us))
    for (double t : parse_doubles(a.ts)) {
      const std::string tag = "u=" + fmt17(u) + ",t=" + fmt17(t);
      try {
        const MajorantReport m = assemble_majorant(fs, u, t, ncut, xgrid);
        json j = to_json(m);
        j["u"] = u;
        j["t"] = t;
        maj.push_back(j);
        run.check("condition1 " + tag, m.condition1, {{"residual", m.condition1_residual}});
        run.check("condition2 " + tag, m.condition2,
                  {{"weighted_mass", m.weighted_mass}, {"bound", m.condition2_bound}});
      } catch (const ViolatedDominance& e) {
        maj.push_back({{"u", u}, {"t", t}, {"error", e.kind()}, {"message", e.what()}});
        run.check("majorant " + tag, false, {{"error", e.what()}});
      }
    }
  run.result = {{"label", fs.label}, {"k", fs.k}, {"dominance", to_json(dom)}, {"K", to_json(K)}, {"majorants", maj}};
  run.write_json("fourier.json", run.result);
}

struct AuditArgs {
  std::string spec = "ex31", k = "1", spec_json, psi = "state";
  int n = 10;
  double x0 = 0.0, radius = 1e-3, umin = 0.1, umax = 1e3;
  std::size_t nx = 41, nu = 61;
  std::optional<double> L;
};

void cmd_audit(Run& run, const AuditArgs& a) {
  const SymbolSpec spec = named_spec(a.spec, a.k, a.n, a.spec_json);
  std::function<complex(double)> psi;
  if (a.psi == "state") {
    psi = exponent_at(spec, a.x0);
  } else if (a.psi == "inner") {
    if (const auto* p = std::get_if<ProductCosine>(&spec)) psi = as_function(p->psi);
    else if (const auto* c = std::get_if<ConstantSymbol>(&spec)) psi = as_function(c->psi);
    else throw ParseError("--psi inner needs a prodcos or constant symbol");
  } else {
    throw ParseError("--psi must be 'state' or 'inner'");
  }
  if (!(a.umin > 0.0 && a.umax > a.umin) || a.nu < 2) throw ParseError("need 0 < umin < umax and nu >= 2");
  std::vector<double> ugrid;
  for (std::size_t i = 0; i < a.nu; ++i) {
    const double u = a.umin * std::pow(a.umax / a.umin, static_cast<double>(i) / (a.nu - 1));
    ugrid.push_back(u);
    ugrid.push_back(-u);
  }
  EllipticityOptions opt;
  opt.L = a.L;
  const EllipticityAudit au = audit_ellipticity(spec, psi, a.x0, a.radius, a.nx, ugrid, opt);
  {
    auto os = run.open("ellipticity.csv");
    os << "order,sup_re_psi_ratio,slope_re_psi,sup_growth_ratio,slope_growth\n";
    for (const auto& o : au.orders)
      os << o.order << ',' << (o.sup_re_psi_ratio ? fmt17(*o.sup_re_psi_ratio) : "") << ','
         << (o.slope_re_psi ? fmt17(*o.slope_re_psi) : "") << ',' << fmt17(o.sup_growth_ratio) << ','
         << fmt17(o.slope_growth) << '\n';
  }
  if (au.pass_re_psi) run.check("re_psi_bound", *au.pass_re_psi, {{"L", *a.L}});
  if (au.pass_growth) run.check("growth_bound", *au.pass_growth, {{"L", *a.L}});
  run.result = to_json(au);
  run.result["spec"] = to_json(spec);
  run.write_json("ellipticity.json", run.result);
}

struct GroenwallArgs {
  std::string table;
  bool generate = false;
  double c = 1.0, phi0 = 1.0, T = 1.0;
  std::size_t N = 100;
  std::optional<double> beta_scale;
};

void cmd_groenwall(Run& run, const GroenwallArgs& a) {
  GroenwallTable tab;
  if (a.generate) {
    tab = groenwall_recursion_table(a.phi0, a.c, a.T, a.N, [](double) { return 0.0; });
    { auto os = run.open("table.csv"); write_table_csv(os, tab); }
  } else {
    if (a.table.empty()) throw ParseError("pass --table <csv> or --generate");
    std::ifstream is(a.table);
    if (!is) throw ParseError("cannot read " + a.table);
    tab = read_table_csv(is);
  }
  double scale = 0.0;
  for (double p : tab.phi) scale = std::max(scale, std::abs(p));
  if (a.beta_scale) scale = *a.beta_scale;
  const GroenwallReport r = groenwall_verify(tab.t, tab.phi, a.c, exponential_slack(a.c, scale));
  run.check("hypothesis", r.hypothesis);
  run.check("conclusion", r.conclusion, {{"max_conclusion_ratio", r.max_conclusion_ratio}});
  run.result = to_json(r);
  run.result["beta_scale"] = scale;
  run.write_json("groenwall.json", run.result);
}

// ---- config files ----------------------------------------------------------

/// {"command": "<subcommand>", "options": {"paths": 1000, "svg": "out.svg", "csv": true, ...}}
std::vector<std::string> argv_from_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot read config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("command") || !j.at("command").is_string())
    throw ParseError("config needs a string 'command'");
  std::vector<std::string> args{j.at("command").get<std::string>()};
  if (j.contains("options")) {
    if (!j.at("options").is_object()) throw ParseError("config 'options' must be an object");
    for (const auto& [key, v] : j.at("options").items()) {
      const std::string flag = "--" + key;
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back(flag);
      } else if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) joined += (joined.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
        args.push_back(flag);
        args.push_back(joined);
      } else if (v.is_string()) {
        args.push_back(flag);
        args.push_back(v.get<std::string>());
      } else if (v.is_number()) {
        args.push_back(flag);
        args.push_back(v.dump());
      } else {
        throw ParseError("unsupported value for option '" + key + "'");
      }
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        std::vector<std::string> expanded = argv_from_config(args[i + 1]);
        for (std::size_t j = 0; j < args.size(); ++j)
          if (j != i && j != i + 1) expanded.push_back(args[j]);
        args = std::move(expanded);
      } catch (const Error& e) {
        std::cerr << json{{"status", "error"}, {"kind", e.kind()}, {"message", e.what()}, {"exit_code", kInputError}}.dump()
                  << '\n';
        return kInputError;
      }
      break;
    }
  }

  CLI::App app{"symaudit: symbol audits, jump-process simulation and Monte-Carlo checks"};
  app.require_subcommand(1);
  Run run;
  run.argv = args;
  std::string out_dir = ".";
  auto add_common = [&](CLI::App* sc) { sc->add_option("--out-dir", out_dir, "artifact directory"); };

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "ensemble and path simulation");
  s_sim->add_option("--spec", sim.spec)->check(CLI::IsMember({"ex31approx", "ex32approx"}));
  s_sim->add_option("--k", sim.k, "lattice unit token: 1, sqrt2, cbrt2, cbrt4 or a decimal");
  s_sim->add_option("--n", sim.n)->check(CLI::Range(0, 60));
  s_sim->add_option("--t", sim.t)->check(CLI::PositiveNumber);
  s_sim->add_option("--x0", sim.x0, "start coordinate in units of k");
  s_sim->add_option("--paths", sim.paths)->check(CLI::PositiveNumber);
  s_sim->add_option("--retain", sim.retain, "full paths kept for CSV/SVG");
  s_sim->add_option("--seed", sim.seed);
  s_sim->add_option("--max-events", sim.max_events)->check(CLI::PositiveNumber);
  s_sim->add_option("--threads", sim.threads);
  s_sim->add_flag("--paths-csv", sim.paths_csv, "write paths.csv");
  s_sim->add_option("--svg", sim.svg, "SVG file of up to 3 paths");
  s_sim->add_option("--svg-k", sim.svg_k, "comma-separated k tokens, one path each");
  s_sim->add_flag("--log-y", sim.log_y);
  add_common(s_sim);

  MomentsArgs mom;
  auto* s_mom = app.add_subcommand("moments", "Monte-Carlo moments against closed forms");
  s_mom->add_option("--spec", mom.spec)->check(CLI::IsMember({"ex31approx", "ex32approx"}));
  s_mom->add_option("--k", mom.k);
  s_mom->add_option("--n", mom.n)->check(CLI::Range(0, 60));
  s_mom->add_option("--t", mom.t)->check(CLI::PositiveNumber);
  s_mom->add_option("--orders", mom.orders, "comma-separated moment orders");
  s_mom->add_option("--paths", mom.paths)->check(CLI::Range(2ul, 1ul << 40));
  s_mom->add_option("--seed", mom.seed);
  s_mom->add_option("--threads", mom.threads);
  add_common(s_mom);

  NonuniqArgs nu;
  auto* s_nu = app.add_subcommand("nonuniq", "two lattices, one symbol: support, moments, ECF distance");
  s_nu->add_option("--n", nu.n)->check(CLI::Range(0, 60));
  s_nu->add_option("--t", nu.t)->check(CLI::PositiveNumber);
  s_nu->add_option("--paths", nu.paths)->check(CLI::Range(2ul, 1ul << 40));
  s_nu->add_option("--seed", nu.seed);
  s_nu->add_option("--k-a", nu.ka);
  s_nu->add_option("--k-b", nu.kb);
  s_nu->add_option("--threshold", nu.threshold, "required d / se_bound");
  s_nu->add_option("--threads", nu.threads);
  add_common(s_nu);

  SelftestArgs st;
  auto* s_st = app.add_subcommand("measure-selftest", "measure-algebra and term-measure sweeps");
  s_st->add_option("--count", st.count)->check(CLI::PositiveNumber);
  s_st->add_option("--terms", st.terms)->check(CLI::PositiveNumber);
  s_st->add_option("--seed", st.seed);
  add_common(s_st);

  FourierArgs fa;
  auto* s_fc = app.add_subcommand("fourier-check", "dominance, K and majorant reports");
  s_fc->add_option("--symbol", fa.symbol)->check(CLI::IsMember({"prodcos", "localized"}));
  s_fc->add_option("--x0", fa.x0);
  s_fc->add_option("--ell", fa.ell)->check(CLI::PositiveNumber);
  s_fc->add_option("--nmax", fa.nmax)->check(CLI::PositiveNumber);
  s_fc->add_option("--quadrature", fa.quadrature)->check(CLI::PositiveNumber);
  s_fc->add_option("--ncut", fa.ncut, "truncation for the majorant (default 1 for prodcos, nmax otherwise)");
  s_fc->add_option("--u", fa.us, "comma-separated frequencies for the majorant");
  s_fc->add_option("--t", fa.ts, "comma-separated times in [0, 1]");
  s_fc->add_option("--k-range", fa.k_range, "lo,hi: required range for K");
  s_fc->add_flag("--csv", fa.csv, "write margin.csv and K.csv");
  add_common(s_fc);

  AuditArgs au;
  auto* s_au = app.add_subcommand("audit", "smoothness and ellipticity audit tables");
  s_au->add_option("--spec", au.spec)
      ->check(CLI::IsMember({"ex31", "ex32", "prodcos", "constant", "ex31approx", "ex32approx"}));
  s_au->add_option("--spec-json", au.spec_json, "symbol JSON file (overrides --spec)");
  s_au->add_option("--k", au.k);
  s_au->add_option("--n", au.n);
  s_au->add_option("--psi", au.psi, "state: psi = q(x0, .); inner: the exponent inside prodcos/constant");
  s_au->add_option("--x0", au.x0);
  s_au->add_option("--radius", au.radius)->check(CLI::PositiveNumber);
  s_au->add_option("--nx", au.nx)->check(CLI::PositiveNumber);
  s_au->add_option("--umin", au.umin);
  s_au->add_option("--umax", au.umax);
  s_au->add_option("--nu", au.nu);
  s_au->add_option("--L", au.L, "bound to check the ratios against");
  add_common(s_au);

  GroenwallArgs gw;
  auto* s_gw = app.add_subcommand("groenwall", "verify the Groenwall hypothesis and bound on a table");
  s_gw->add_option("--table", gw.table, "CSV with rows t,phi");
  s_gw->add_flag("--generate", gw.generate, "use phi_{n+1} = (1 + cT/N) phi_n");
  s_gw->add_option("--c", gw.c)->check(CLI::PositiveNumber);
  s_gw->add_option("--phi0", gw.phi0);
  s_gw->add_option("--T", gw.T)->check(CLI::PositiveNumber);
  s_gw->add_option("--N", gw.N)->check(CLI::PositiveNumber);
  s_gw->add_option("--beta-scale", gw.beta_scale, "slack scale (default max |phi|)");
  add_common(s_gw);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"status", "error"}, {"kind", "ParseError"}, {"message", e.what()}, {"exit_code", kInputError}}.dump()
              << '\n';
    return kInputError;
  }

  CLI::App* sc = app.get_subcommands().front();
  run.command = sc->get_name();
  run.out_dir = out_dir;
  for (const CLI::Option* o : sc->get_options()) {
    if (o->get_name() == "--help" || o->get_name().empty()) continue;
    const auto res = o->results();
    std::string name = o->get_name();
    name.erase(0, name.find_first_not_of('-'));
    if (o->get_expected_min() == 0) run.options[name] = o->count() > 0;
    else if (!res.empty()) run.options[name] = res.back();
  }

  int code = kPass;
  std::string status = "pass";
  try {
    if (run.command == "simulate") cmd_simulate(run, sim);
    else if (run.command == "moments") cmd_moments(run, mom);
    else if (run.command == "nonuniq") cmd_nonuniq(run, nu);
    else if (run.command == "measure-selftest") cmd_measure_selftest(run, st);
    else if (run.command == "fourier-check") cmd_fourier_check(run, fa);
    else if (run.command == "audit") cmd_audit(run, au);
    else if (run.command == "groenwall") cmd_groenwall(run, gw);
    if (!run.all_pass()) {
      code = kCheckFailed;
      status = "fail";
      json failed = json::array();
      for (const auto& c : run.checks)
        if (!c.at("pass").get<bool>()) failed.push_back(c);
      const json f{{"status", "fail"}, {"exit_code", code}, {"failed_checks", failed}};
      run.write_json("failure.json", f);
      std::cerr << f.dump() << '\n';
    }
  } catch (const Error& e) {
    code = exit_code_of(e);
    status = "error";
    const json f{{"status", "error"}, {"kind", e.kind()}, {"message", e.what()}, {"exit_code", code}};
    try {
      run.write_json("failure.json", f);
    } catch (...) {
    }
    std::cerr << f.dump() << '\n';
  } catch (const std::exception& e) {
    code = kInputError;
    status = "error";
    const json f{{"status", "error"}, {"kind", "std::exception"}, {"message", e.what()}, {"exit_code", code}};
    std::cerr << f.dump() << '\n';
  }
  try {
    json m = run.manifest(status, code);
    m["checks"] = run.checks;
    m["result"] = run.result;
    fs::create_directories(run.out_dir);
    std::ofstream(run.out_dir / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "could not write manifest: " << e.what() << '\n';
    if (code == kPass) code = kInputError;
  }
  std::cout << json{{"command", run.command}, {"status", status}, {"exit_code", code}, {"checks", run.checks.size()}}.dump()
            << '\n';
  return code;
}
