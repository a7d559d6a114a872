#include "ldes/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldes/calibration.hpp"
#include "ldes/config_io.hpp"
#include "ldes/dispatch.hpp"
#include "ldes/equilibrium.hpp"
#include "ldes/errors.hpp"
#include "ldes/lp/lp_format.hpp"
#include "ldes/report.hpp"
#include "ldes/synthetic.hpp"
#include "ldes/text.hpp"

namespace ldes {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int grid = 21;
  std::string out = "out";
  std::string format = "csv";
  int parallel = 1;
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (auto part : text::split(s, ',')) {
    part = text::trim(part);
    if (!part.empty()) v.push_back(text::to_double(part, what));
  }
  return v;
}

ContractFamily parse_mechanism(const std::string& s) {
  auto f = parse_family(s);
  if (!f) throw ValidationError("mechanism", "unknown mechanism '" + s + "' (cf, rcfd, scfd, avc)");
  return *f;
}

SystemConfig load(const Common& c) {
  if (c.config.empty()) throw ValidationError("config", "--config is required");
  SystemConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

GridSpec grid_of(const Common& c) {
  GridSpec g;
  g.points = c.grid;
  return g;
}

json provenance(const SystemConfig& cfg, const Common& c) {
  return {{"version", kVersion}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed}, {"grid_points", c.grid}};
}

void write_out(const Common& c, const std::string& name, const std::string& content) {
  fs::create_directories(c.out);
  text::write_file((fs::path(c.out) / name).string(), content);
}

json equilibrium_json(const EquilibriumResult& r) {
  json j;
  j["technology"] = r.technology;
  j["capacity_mw"] = r.capacity;
  j["rho"] = r.rho;
  j["selection"] = r.selection;
  j["multiple_equilibria"] = r.multiple_equilibria;
  j["contract"] = r.contract ? json(describe(*r.contract)) : json(nullptr);
  j["delta"] = r.profile.delta;
  j["psi"] = r.profile.psi;
  j["capacities"] = r.capacities;
  j["profits"] = r.profits;
  j["residuals"] = r.residuals;
  j["expected_welfare"] = r.expected_welfare;
  json trace = json::array();
  for (const auto& [c, rho] : r.grid_trace) trace.push_back(json::array({c, rho}));
  j["grid_trace"] = trace;
  json cross = json::array();
  for (const auto& x : r.crossings) cross.push_back({{"lower", x.lower}, {"upper", x.upper}, {"stable", x.stable}});
  j["crossings"] = cross;
  json sc = json::array();
  for (std::size_t s = 0; s < r.per_scenario.size(); ++s) {
    const auto& d = r.per_scenario[s];
    const auto& e = r.exposures[s];
    sc.push_back({{"scenario", d.scenario_id},
                  {"probability", d.probability},
                  {"welfare", d.welfare},
                  {"consumer_surplus", d.consumer_surplus},
                  {"unmet_demand_mwh", d.unmet_demand_mwh},
                  {"net_revenue", e.net_revenue},
                  {"sigma", e.sigma},
                  {"v", e.v},
                  {"tau", e.tau}});
  }
  j["scenarios"] = sc;
  return j;
}

void print_capacities(std::ostream& out, const Capacities& caps) {
  for (const auto& [name, mw] : caps) out << "  " << name << " " << text::num(mw) << " MW\n";
}

int run_dispatch(const Common& c, const std::vector<std::string>& capacity_args, const std::string& scenario,
                 const std::string& lp_dump, std::ostream& out) {
  const SystemConfig cfg = load(c);
  Capacities caps;
  for (const auto& arg : capacity_args) {
    for (auto part : text::split(arg, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw ParseError("--capacity expects NAME=MW, got '" + std::string(part) + "'");
      caps[std::string(text::trim(part.substr(0, eq)))] = text::to_double(part.substr(eq + 1), "--capacity");
    }
  }
  if (caps.empty()) caps = risk_neutral_expansion(cfg, {});
  out << "capacities:\n";
  print_capacities(out, caps);

  std::vector<DispatchResult> results;
  bool dumped = false;
  for (const auto& s : cfg.scenarios) {
    if (!scenario.empty() && s.id != scenario) continue;
    DispatchProblem p = build_dispatch(cfg, caps, s);
    if (!lp_dump.empty() && !dumped) {
      std::ofstream f(lp_dump);
      if (!f) throw ValidationError("lp-dump", "cannot write " + lp_dump);
      lp::write_lp_format(p.model, f);
      dumped = true;
    }
    results.push_back(solve_dispatch(p));
  }
  if (results.empty()) throw ValidationError("scenario", "no scenario '" + scenario + "'");

  json j;
  j["provenance"] = provenance(cfg, c);
  j["capacities"] = caps;
  json sc = json::array();
  out << "scenario,welfare,mean_price,unmet_mwh,consumer_surplus\n";
  for (const auto& r : results) {
    double hours = 0.0, price = 0.0;
    for (std::size_t t = 0; t < r.prices.size(); ++t) {
      hours += r.weights[t];
      price += r.weights[t] * r.prices[t];
    }
    out << r.scenario_id << "," << text::num(r.welfare) << "," << text::num(price / hours) << ","
        << text::num(r.unmet_demand_mwh) << "," << text::num(r.consumer_surplus) << "\n";
    sc.push_back({{"scenario", r.scenario_id},
                  {"welfare", r.welfare},
                  {"mean_price", price / hours},
                  {"unmet_demand_mwh", r.unmet_demand_mwh},
                  {"curtailment_mwh", r.curtailment_mwh},
                  {"consumer_surplus", r.consumer_surplus},
                  {"net_revenue_per_mw", r.net_revenue_per_mw}});
  }
  j["scenarios"] = sc;
  write_out(c, "dispatch.json", j.dump(2) + "\n");
  if (c.format == "csv") {
    std::ostringstream os;
    write_dispatch_csv(os, results);
    write_out(c, "dispatch.csv", os.str());
  }
  return 0;
}

std::optional<Contract> contract_from(const SystemConfig& cfg, const std::string& mechanism,
                                      const std::optional<double>& parameter) {
  if (mechanism.empty()) {
    if (parameter) throw ValidationError("parameter", "--parameter needs --mechanism");
    return cfg.contract;
  }
  if (mechanism == "none") return std::nullopt;
  if (!parameter) throw ValidationError("parameter", "--mechanism needs --parameter here (use calibrate to find one)");
  return make_contract(parse_mechanism(mechanism), *parameter, cfg);
}

int run_equilibrium(const Common& c, const std::optional<double>& delta, const std::string& mechanism,
                    const std::optional<double>& parameter, const std::optional<double>& target_gw,
                    std::ostream& out) {
  const SystemConfig cfg = load(c);
  InvestorProfile profile = cfg.investor(cfg.contract_technology);
  if (delta) profile.delta = *delta;
  GridSpec grid = grid_of(c);
  if (target_gw) grid.target_mw = *target_gw * 1e3;
  Evaluator ev(cfg, {c.parallel, {}});
  const EquilibriumResult r = find_equilibrium(ev, contract_from(cfg, mechanism, parameter), profile, grid);
  out << "equilibrium (" << r.selection << (r.multiple_equilibria ? ", multiple candidates" : "") << ")\n";
  print_capacities(out, r.capacities);
  out << "rho " << text::num(r.rho) << " $/MW-yr\n";
  json j = equilibrium_json(r);
  j["provenance"] = provenance(cfg, c);
  write_out(c, "equilibrium.json", j.dump(2) + "\n");
  if (c.format == "csv") {
    std::ostringstream os;
    os << "capacity_mw,rho\n";
    for (const auto& [cap, rho] : r.grid_trace) os << text::num(cap) << "," << text::num(rho) << "\n";
    write_out(c, "grid_trace.csv", os.str());
  }
  return 0;
}

int run_calibrate(const Common& c, const std::string& mechanism, const std::optional<double>& delta,
                  const std::optional<double>& target_gw, const std::string& bounds, std::ostream& out) {
  if (mechanism.empty()) throw ValidationError("mechanism", "--mechanism is required");
  const ContractFamily family = parse_mechanism(mechanism);
  const SystemConfig cfg = load(c);
  InvestorProfile profile = cfg.investor(cfg.contract_technology);
  if (delta) profile.delta = *delta;
  Evaluator ev(cfg, {c.parallel, {}});
  const GridSpec grid = grid_of(c);
  double target = 0.0;
  if (target_gw) {
    target = *target_gw * 1e3;
  } else {
    InvestorProfile neutral = profile;
    neutral.delta = 1.0;
    target = find_equilibrium(ev, std::nullopt, neutral, grid).capacity;
  }
  CalibrationOptions opt;
  if (!bounds.empty()) {
    const auto b = parse_list(bounds, "--bounds");
    if (b.size() != 2) throw ParseError("--bounds expects LOWER,UPPER");
    opt.bounds = ParameterBounds{b[0], b[1]};
  }
  const CalibrationResult r = calibrate(ev, family, target, profile, grid, opt);
  const Technology& tech = ev.contracted();
  out << family_label(family) << " calibrated to " << text::num(target) << " MW at delta " << text::num(profile.delta)
      << "\n";
  out << "  " << describe(r.contract) << "\n";
  if (family == ContractFamily::RevenueCfD || family == ContractFamily::Availability) {
    out << "  " << (family == ContractFamily::RevenueCfD ? "strike" : "payment rate") << " " << text::num(100.0 * r.parameter)
        << "% of F (" << text::num(r.parameter * tech.fixed_cost()) << " $/MW-yr)\n";
  }
  out << "  equilibrium " << text::num(r.equilibrium.capacity) << " MW, residual " << text::num(r.residual_mw)
      << " MW (grid step " << text::num(r.grid_step_mw) << " MW), " << r.iterations << " iterations\n";
  json j;
  j["provenance"] = provenance(cfg, c);
  j["mechanism"] = std::string(family_name(family));
  j["contract"] = describe(r.contract);
  j["parameter"] = r.parameter;
  j["target_mw"] = r.target_mw;
  j["iterations"] = r.iterations;
  j["residual_mw"] = r.residual_mw;
  j["grid_step_mw"] = r.grid_step_mw;
  j["rho_at_target"] = r.rho_at_target;
  json curve = json::array();
  for (const auto& [p, cap] : r.curve) curve.push_back(json::array({p, cap}));
  j["curve"] = curve;
  j["equilibrium"] = equilibrium_json(r.equilibrium);
  write_out(c, "calibration.json", j.dump(2) + "\n");
  return 0;
}

int run_sweep(const Common& c, const std::string& deltas, const std::string& mechanism,
              const std::optional<double>& parameter, std::ostream& out) {
  const SystemConfig cfg = load(c);
  const InvestorProfile base = cfg.investor(cfg.contract_technology);
  Evaluator ev(cfg, {c.parallel, {}});
  const auto ds = parse_list(deltas, "--delta");
  const auto results = sweep_risk_aversion(ev, contract_from(cfg, mechanism, parameter), base, ds, grid_of(c));
  std::vector<Outcome> outcomes;
  for (const auto& r : results) outcomes.push_back(summarize(cfg, r, mechanism.empty() ? "config" : mechanism));
  const std::string csv = table1_csv(make_table1(cfg, outcomes));
  out << csv;
  if (c.format == "csv") {
    write_out(c, "sweep.csv", csv);
  } else {
    json j;
    j["provenance"] = provenance(cfg, c);
    json a = json::array();
    for (const auto& r : results) a.push_back(equilibrium_json(r));
    j["equilibria"] = a;
    write_out(c, "sweep.json", j.dump(2) + "\n");
  }
  return 0;
}

int run_report(const Common& c, const std::string& from, const std::string& mechanisms, const std::string& deltas,
               const std::optional<double>& study_delta, const std::optional<double>& target_gw,
               const std::string& incidence, std::ostream& out, std::ostream& err) {
  const bool csv = c.format == "csv";
  if (!from.empty()) {
    const StudyReport r = report_from_json(text::read_file(from));
    write_report(r, c.out, csv);
    out << "regenerated report in " << c.out << "\n";
    return 0;
  }
  const SystemConfig cfg = load(c);
  StudySpec spec;
  spec.grid = grid_of(c);
  spec.workers = c.parallel;
  if (mechanisms.empty()) {
    spec.mechanisms = {ContractFamily::RevenueCfD, ContractFamily::SpreadCfD, ContractFamily::CapFloor,
                       ContractFamily::Availability};
  } else if (mechanisms != "none") {
    for (auto m : text::split(mechanisms, ',')) spec.mechanisms.push_back(parse_mechanism(std::string(text::trim(m))));
  }
  if (!deltas.empty()) spec.deltas = parse_list(deltas, "--delta");
  if (study_delta) spec.delta = *study_delta;
  if (target_gw) spec.target_mw = *target_gw * 1e3;
  auto inc = parse_incidence(incidence);
  if (!inc) throw ValidationError("cost-incidence", "expected consumers or none");
  spec.incidence = *inc;

  Evaluator ev(cfg, {c.parallel, {}});
  std::string kind;
  const StudyReport r = run_study(ev, spec, &kind);
  write_report(r, c.out, csv);
  if (r.status != "complete") {
    err << "error: stage " << r.failed_stage << ": " << r.error << "\n"
        << "partial report written to " << c.out << "\n";
    return kind == "validation" ? 1 : 2;
  }
  std::ifstream t1(fs::path(c.out) / "table3.csv");
  out << "report written to " << c.out << " (" << ev.lp_solves() << " LP solves)\n";
  if (t1) out << t1.rdbuf();
  return 0;
}

int run_gen_config(const Common& c, int weather, int steps, const std::string& path, std::ostream& out) {
  if (weather < 1) throw ValidationError("weather", "must be >= 1");
  if (steps < 2) throw ValidationError("steps", "must be >= 2");
  const SystemConfig cfg = default_gb_config(weather, steps, c.seed.value_or(1));
  validate(cfg);
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  save_config(cfg, path);
  out << "wrote " << path << " (" << cfg.scenarios.size() << " scenarios x " << cfg.time_grid.steps()
      << " steps, hash " << config_hash(cfg) << ")\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity equilibrium simulator for long-duration storage support contracts", "ldes"};
  app.require_subcommand(1);

  Common c;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* s, bool needs_config) {
    auto* o = s->add_option("--config", c.config, "Config file");
    if (needs_config) o->required();
    s->add_option("--seed", seed, "Seed (overrides the config's)");
    s->add_option("--grid", c.grid, "Capacity grid points over [0, cap_max]")->check(CLI::Range(2, 100000));
    s->add_option("--out", c.out, "Output directory");
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--parallel", c.parallel, "Worker threads")->check(CLI::Range(1, 1024));
  };

  std::vector<std::string> capacities;
  std::string scenario, lp_dump;
  auto* dispatch = app.add_subcommand("dispatch", "Solve scenario dispatch for given capacities");
  add_common(dispatch, true);
  dispatch->add_option("--capacity", capacities, "NAME=MW (default: risk-neutral expansion)");
  dispatch->add_option("--scenario", scenario, "Only this scenario");
  dispatch->add_option("--lp-dump", lp_dump, "Write the first scenario LP in LP format");

  std::optional<double> delta, parameter, target_gw, study_delta;
  std::string mechanism, bounds;
  auto* equilibrium = app.add_subcommand("equilibrium", "Find the capacity equilibrium");
  add_common(equilibrium, true);
  equilibrium->add_option("--delta", delta, "Expected-value weight of the contracted investor");
  equilibrium->add_option("--mechanism", mechanism, "cf, rcfd, scfd, avc or none (default: config contract)");
  equilibrium->add_option("--parameter", parameter, "Free parameter of --mechanism");
  equilibrium->add_option("--target-gw", target_gw, "Capacity chosen when profit is zero everywhere");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate a contract to a target capacity");
  add_common(calibrate_cmd, true);
  calibrate_cmd->add_option("--mechanism", mechanism, "cf, rcfd, scfd or avc")->required();
  calibrate_cmd->add_option("--delta", delta, "Expected-value weight of the contracted investor");
  calibrate_cmd->add_option("--target-gw", target_gw, "Target capacity (default: risk-neutral equilibrium)");
  calibrate_cmd->add_option("--bounds", bounds, "LOWER,UPPER search range of the parameter");

  std::string deltas = "1.0,0.9,0.8,0.7,0.6";
  auto* sweep = app.add_subcommand("sweep", "Equilibria across risk-aversion levels");
  add_common(sweep, true);
  sweep->add_option("--delta", deltas, "Comma-separated list");
  sweep->add_option("--mechanism", mechanism, "cf, rcfd, scfd, avc or none (default: config contract)");
  sweep->add_option("--parameter", parameter, "Free parameter of --mechanism");

  std::string from, mechanisms, report_deltas, incidence = "consumers";
  auto* report = app.add_subcommand("report", "Run the full study and write tables and plot data");
  add_common(report, false);
  report->add_option("--from", from, "Regenerate the report files from a result.json");
  report->add_option("--mechanism", mechanisms, "Comma-separated list, or none (default: all four)");
  report->add_option("--delta", report_deltas, "Risk-aversion sweep (default 1.0,0.9,0.8,0.7,0.6)");
  report->add_option("--study-delta", study_delta, "Risk aversion for calibration (default 0.6)");
  report->add_option("--target-gw", target_gw, "Calibration target (default: risk-neutral equilibrium)");
  report->add_option("--cost-incidence", incidence, "Who pays contract payoffs")
      ->check(CLI::IsMember({"consumers", "none"}));

  int weather = 2, steps = 48;
  std::string config_out = "gb.cfg";
  auto* gen = app.add_subcommand("gen-config", "Write the synthetic GB-like config");
  gen->add_option("--seed", seed, "Generator seed (default 1)");
  gen->add_option("--weather", weather, "Weather draws");
  gen->add_option("--steps", steps, "Time steps per scenario");
  gen->add_option("--out", config_out, "Config path (profiles written alongside)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  for (auto* s : app.get_subcommands()) {
    if (s->count("--seed")) c.seed = seed;
  }

  try {
    if (*dispatch) return run_dispatch(c, capacities, scenario, lp_dump, out);
    if (*equilibrium) return run_equilibrium(c, delta, mechanism, parameter, target_gw, out);
    if (*calibrate_cmd) return run_calibrate(c, mechanism, delta, target_gw, bounds, out);
    if (*sweep) return run_sweep(c, deltas, mechanism, parameter, out);
    if (*report) {
      if (from.empty() && c.config.empty()) throw ValidationError("config", "--config or --from is required");
      return run_report(c, from, mechanisms, report_deltas, study_delta, target_gw, incidence, out, err);
    }
    if (*gen) return run_gen_config(c, weather, steps, config_out, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace ldes
