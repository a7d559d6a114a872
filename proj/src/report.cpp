#include "ldes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ldes/config_io.hpp"
#include "ldes/contracts.hpp"
#include "ldes/errors.hpp"
#include "ldes/risk.hpp"
#include "ldes/text.hpp"

namespace ldes {

using json = nlohmann::ordered_json;

std::optional<double> cs_index(double mechanism_cs, double incomplete_cs, double risk_neutral_cs) {
  const double span = risk_neutral_cs - incomplete_cs;
  if (span == 0.0 || !std::isfinite(span)) return std::nullopt;
  return 100.0 * (mechanism_cs - incomplete_cs) / span;
}

std::string_view incidence_name(CostIncidence c) { return c == CostIncidence::Consumers ? "consumers" : "none"; }

std::optional<CostIncidence> parse_incidence(std::string_view s) {
  if (s == "consumers") return CostIncidence::Consumers;
  if (s == "none") return CostIncidence::None;
  return std::nullopt;
}

namespace {

std::string group_of(TechKind k) {
  switch (k) {
    case TechKind::Thermal: return "thermal";
    case TechKind::NuclearFixed: return "nuclear";
    case TechKind::Renewable: return "renewable";
    case TechKind::Storage: return "storage_discharge";
  }
  return "other";
}

CashflowDistribution dist(const std::vector<double>& v, const std::vector<double>& p) {
  return CashflowDistribution{v, p};
}

double mean_of(const std::vector<double>& v, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += p[i] * v[i];
  return s;
}

}  // namespace

Outcome summarize(const SystemConfig& config, const EquilibriumResult& eq, const std::string& label) {
  const Technology& tech = config.contracted();
  const double rf = eq.profile.risk_free_rate;
  const Contract* k = eq.contract ? &*eq.contract : nullptr;
  Outcome o;
  o.label = label;
  o.delta = eq.profile.delta;
  o.capacity_mw = eq.capacity;
  o.capacities = eq.capacities;
  o.selection = eq.selection;
  o.multiple_equilibria = eq.multiple_equilibria;
  o.rho = eq.rho;
  o.residuals = eq.residuals;
  for (const auto& t : config.technologies) o.generation_twh[group_of(t.kind)] = 0.0;
  for (std::size_t s = 0; s < eq.per_scenario.size(); ++s) {
    const DispatchResult& r = eq.per_scenario[s];
    const ScenarioExposure& e = eq.exposures[s];
    o.scenarios.push_back(r.scenario_id);
    o.probabilities.push_back(r.probability);
    o.revenue.push_back(settled_revenue(k, e, tech, rf));
    o.payoff.push_back(k ? payoff(*k, e, tech, rf) : 0.0);
    const IrrResult irr = scenario_irr(o.revenue.back(), tech, rf);
    o.irr.push_back(irr.rate);
    o.irr_finite.push_back(irr.finite);
    o.consumer_surplus.push_back(r.consumer_surplus);

    const double hours = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    double price = 0.0;
    for (std::size_t t = 0; t < r.prices.size(); ++t) price += r.weights[t] * r.prices[t];
    o.mean_price += r.probability * price / hours;
    o.unmet_gwh += r.probability * r.unmet_demand_mwh / 1e3;
    o.curtailment_twh += r.probability * r.curtailment_mwh / 1e6;
    for (const auto& t : config.technologies) {
      const auto& q = r.dispatch.at(t.name);
      double mwh = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) mwh += r.weights[i] * q[i];
      o.generation_twh[group_of(t.kind)] += r.probability * mwh / 1e6;
    }
  }
  o.implied_wacc = implied_wacc(dist(o.revenue, o.probabilities), tech, rf).rate;
  return o;
}

Table1 make_table1(const SystemConfig& config, const std::vector<Outcome>& sweep) {
  Table1 t;
  auto row = [&](const std::string& name, auto get) {
    std::vector<double> v;
    for (const auto& o : sweep) v.push_back(get(o));
    t.rows.emplace_back(name, std::move(v));
  };
  for (const auto& o : sweep) t.deltas.push_back(o.delta);
  row("implied_wacc_pct", [](const Outcome& o) { return 100.0 * o.implied_wacc; });
  row(config.contract_technology + "_gw", [](const Outcome& o) { return o.capacity_mw / 1e3; });
  row("avg_price_usd_per_mwh", [](const Outcome& o) { return o.mean_price; });
  row("unmet_demand_gwh", [](const Outcome& o) { return o.unmet_gwh; });
  for (const char* g : {"thermal", "nuclear", "renewable", "storage_discharge"}) {
    if (sweep.empty() || !sweep.front().generation_twh.count(g)) continue;
    row(std::string("gen_") + g + "_twh", [g](const Outcome& o) { return o.generation_twh.at(g); });
  }
  row("curtailment_twh", [](const Outcome& o) { return o.curtailment_twh; });
  for (const auto& tech : config.technologies) {
    if (!tech.investable() || tech.name == config.contract_technology) continue;
    const std::string name = tech.name;
    row(name + "_gw", [name](const Outcome& o) { return o.capacities.at(name) / 1e3; });
  }
  return t;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : "NA"; }

std::string delta_label(double d) {
  std::string s = text::num(d);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
  return s;
}

std::string parameter_unit(ContractFamily f) {
  switch (f) {
    case ContractFamily::CapFloor: return "pct_cost_of_capital";
    case ContractFamily::SpreadCfD: return "usd_per_mwh";
    case ContractFamily::RevenueCfD:
    case ContractFamily::Availability: return "pct_of_fixed_cost";
  }
  return "";
}

double displayed_parameter(ContractFamily f, double p) { return f == ContractFamily::SpreadCfD ? p : 100.0 * p; }

// Mean of the two weighted medians, so an even equiprobable sample gives
// the usual midpoint.
double weighted_median(std::vector<double> v, std::vector<double> p) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  double cum = 0.0;
  std::optional<double> lower;
  for (std::size_t i : idx) {
    cum += p[i];
    if (!lower && cum >= 0.5 - 1e-12) lower = v[i];
    if (cum > 0.5 + 1e-12) return 0.5 * (*lower + v[i]);
  }
  return lower.value_or(0.0);
}

const Outcome* find_outcome(const StudyReport& r, const std::string& label, double delta) {
  for (const auto& o : r.outcomes) {
    if (o.label == label && o.delta == delta) return &o;
  }
  return nullptr;
}

std::vector<double> charged_surplus(const Outcome& o, CostIncidence inc) {
  std::vector<double> cs = o.consumer_surplus;
  if (inc == CostIncidence::Consumers) {
    for (std::size_t s = 0; s < cs.size(); ++s) cs[s] -= o.payoff[s] * o.capacity_mw;
  }
  return cs;
}

void add_cs_rows(StudyReport& rep, const Outcome& incomplete, const Outcome& neutral, const std::vector<const Outcome*>& rows,
                 double psi) {
  for (CostIncidence inc : {CostIncidence::Consumers, CostIncidence::None}) {
    const auto base_i = charged_surplus(incomplete, inc);
    const auto base_n = charged_surplus(neutral, inc);
    const double mi = mean_of(base_i, incomplete.probabilities);
    const double ci = cvar(dist(base_i, incomplete.probabilities), psi);
    const double mn = mean_of(base_n, neutral.probabilities);
    const double cn = cvar(dist(base_n, neutral.probabilities), psi);
    for (const Outcome* o : rows) {
      const auto cs = charged_surplus(*o, inc);
      CsRow row;
      row.mechanism = o->label;
      row.incidence = std::string(incidence_name(inc));
      row.mean_cs = mean_of(cs, o->probabilities);
      row.cvar_cs = cvar(dist(cs, o->probabilities), psi);
      row.mean_index = cs_index(row.mean_cs, mi, mn);
      row.cvar_index = cs_index(row.cvar_cs, ci, cn);
      rep.cs_index.push_back(row);
    }
  }
}

Table2Row table2_row(const Outcome& o, double psi) {
  const RevenueStats st = revenue_stats(dist(o.revenue, o.probabilities), o.irr, psi);
  Table2Row row;
  row.mechanism = o.label;
  if (st.cv_defined) row.cv = st.cv;
  row.min_irr = st.min_irr;
  row.cvar_irr = st.cvar_irr;
  row.implied_wacc = o.implied_wacc;
  return row;
}

}  // namespace

StudyReport run_study(Evaluator& ev, const StudySpec& spec, std::string* error_kind) {
  const SystemConfig& config = ev.config();
  const Technology& tech = ev.contracted();
  const InvestorProfile base = config.investor(tech.name);
  const double F = tech.fixed_cost();

  StudyReport rep;
  Provenance& pv = rep.provenance;
  pv.config_hash = config_hash(config);
  pv.seed = config.seed;
  pv.grid_points = spec.grid.points;
  pv.tolerance_mw = spec.grid.tolerance_mw;
  pv.plateau_tolerance = spec.grid.plateau_tolerance;
  pv.zero_profit_tolerance = kZeroProfitTolerance;
  pv.psi = base.psi;
  pv.risk_free_rate = base.risk_free_rate;
  pv.study_delta = spec.delta;
  pv.deltas = spec.deltas;
  for (auto f : spec.mechanisms) pv.mechanisms.emplace_back(family_name(f));
  pv.incidence = std::string(incidence_name(spec.incidence));
  pv.technology = tech.name;
  pv.fixed_cost = F;

  auto profile_at = [&](double d) {
    InvestorProfile p = base;
    p.delta = d;
    return p;
  };

  std::string stage = "baselines";
  try {
    GridSpec grid = spec.grid;
    const EquilibriumResult neutral = find_equilibrium(ev, std::nullopt, profile_at(1.0), grid);
    const double target = spec.target_mw.value_or(neutral.capacity);
    pv.target_mw = target;
    grid.target_mw = target;
    rep.outcomes.push_back(summarize(config, neutral, "risk-neutral"));
    const Outcome neutral_o = rep.outcomes.back();
    rep.outcomes.push_back(summarize(config, find_equilibrium(ev, std::nullopt, profile_at(spec.delta), grid), "none"));
    const Outcome incomplete = rep.outcomes.back();

    stage = "sweep";
    std::vector<Outcome> sweep;
    for (double d : spec.deltas) {
      if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("delta", "must lie in [0, 1]");
      sweep.push_back(summarize(config, find_equilibrium(ev, std::nullopt, profile_at(d), grid), "none"));
      if (d != spec.delta) rep.outcomes.push_back(sweep.back());
    }
    rep.table1 = make_table1(config, sweep);
    rep.table2.push_back(table2_row(incomplete, base.psi));

    std::vector<const Outcome*> cs_rows;
    for (ContractFamily f : spec.mechanisms) {
      const std::string name(family_name(f));
      stage = "calibration:" + name;
      const CalibrationResult cal = calibrate(ev, f, target, profile_at(spec.delta), grid);
      CalibrationRecord cr;
      cr.mechanism = name;
      cr.contract = describe(cal.contract);
      cr.parameter = cal.parameter;
      cr.target_mw = cal.target_mw;
      cr.capacity_mw = cal.equilibrium.capacity;
      cr.residual_mw = cal.residual_mw;
      cr.grid_step_mw = cal.grid_step_mw;
      cr.rho_at_target = cal.rho_at_target;
      cr.iterations = cal.iterations;
      cr.curve = cal.curve;
      rep.calibrations.push_back(cr);
      rep.outcomes.push_back(summarize(config, cal.equilibrium, name));
      const Outcome& o = rep.outcomes.back();

      rep.table2.push_back(table2_row(o, base.psi));
      const MechanismCost cost = expected_mechanism_cost(dist(o.payoff, o.probabilities), o.capacity_mw,
                                                         incomplete.capacity_mw, tech);
      rep.table3.push_back({name, displayed_parameter(f, cal.parameter), parameter_unit(f), o.capacity_mw / 1e3,
                            cost.per_mw_installed, cost.per_mw_incentivized});

      stage = "mechanism-sweep:" + name;
      auto& rows = rep.sweeps[name];
      for (std::size_t i = 0; i < spec.deltas.size(); ++i) {
        const double d = spec.deltas[i];
        const CalibrationResult c = d == spec.delta ? cal : calibrate(ev, f, target, profile_at(d), grid);
        const Outcome so = summarize(config, c.equilibrium, name);
        const MechanismCost mc =
            expected_mechanism_cost(dist(so.payoff, so.probabilities), so.capacity_mw, sweep[i].capacity_mw, tech);
        rows.push_back({d, displayed_parameter(f, c.parameter), so.capacity_mw / 1e3, mc.per_mw_installed,
                        mc.per_mw_incentivized, so.implied_wacc});
      }
    }
    stage = "report";
    cs_rows.push_back(&incomplete);
    cs_rows.push_back(&neutral_o);
    for (ContractFamily f : spec.mechanisms) cs_rows.push_back(find_outcome(rep, std::string(family_name(f)), spec.delta));
    add_cs_rows(rep, incomplete, neutral_o, cs_rows, base.psi);
  } catch (const ValidationError& e) {
    rep.status = "incomplete";
    rep.failed_stage = stage;
    rep.error = e.what();
    if (error_kind) *error_kind = "validation";
  } catch (const std::exception& e) {
    rep.status = "incomplete";
    rep.failed_stage = stage;
    rep.error = e.what();
    if (error_kind) *error_kind = "numerical";
  }
  return rep;
}

// ---- JSON ----

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json curve_json(const std::vector<std::pair<double, double>>& c) {
  json a = json::array();
  for (const auto& [x, y] : c) a.push_back(json::array({x, y}));
  return a;
}

std::vector<std::pair<double, double>> curve_from(const json& a) {
  std::vector<std::pair<double, double>> c;
  for (const auto& p : a) c.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return c;
}

json outcome_json(const Outcome& o) {
  json j;
  j["label"] = o.label;
  j["delta"] = o.delta;
  j["capacity_mw"] = o.capacity_mw;
  j["capacities"] = o.capacities;
  j["selection"] = o.selection;
  j["multiple_equilibria"] = o.multiple_equilibria;
  j["rho"] = o.rho;
  j["residuals"] = o.residuals;
  j["scenarios"] = o.scenarios;
  j["probabilities"] = o.probabilities;
  j["revenue"] = o.revenue;
  j["payoff"] = o.payoff;
  j["irr"] = o.irr;
  j["irr_finite"] = o.irr_finite;
  j["consumer_surplus"] = o.consumer_surplus;
  j["implied_wacc"] = o.implied_wacc;
  j["mean_price"] = o.mean_price;
  j["unmet_gwh"] = o.unmet_gwh;
  j["generation_twh"] = o.generation_twh;
  j["curtailment_twh"] = o.curtailment_twh;
  return j;
}

Outcome outcome_from(const json& j) {
  Outcome o;
  o.label = j.at("label").get<std::string>();
  o.delta = j.at("delta").get<double>();
  o.capacity_mw = j.at("capacity_mw").get<double>();
  o.capacities = j.at("capacities").get<std::map<std::string, double>>();
  o.selection = j.at("selection").get<std::string>();
  o.multiple_equilibria = j.at("multiple_equilibria").get<bool>();
  o.rho = j.at("rho").get<double>();
  o.residuals = j.at("residuals").get<std::map<std::string, double>>();
  o.scenarios = j.at("scenarios").get<std::vector<std::string>>();
  o.probabilities = j.at("probabilities").get<std::vector<double>>();
  o.revenue = j.at("revenue").get<std::vector<double>>();
  o.payoff = j.at("payoff").get<std::vector<double>>();
  o.irr = j.at("irr").get<std::vector<double>>();
  o.irr_finite = j.at("irr_finite").get<std::vector<bool>>();
  o.consumer_surplus = j.at("consumer_surplus").get<std::vector<double>>();
  o.implied_wacc = j.at("implied_wacc").get<double>();
  o.mean_price = j.at("mean_price").get<double>();
  o.unmet_gwh = j.at("unmet_gwh").get<double>();
  o.generation_twh = j.at("generation_twh").get<std::map<std::string, double>>();
  o.curtailment_twh = j.at("curtailment_twh").get<double>();
  return o;
}

}  // namespace

std::string to_json(const StudyReport& r) {
  json j;
  j["format"] = "ldes-study/1";
  j["status"] = r.status;
  if (r.status != "complete") {
    j["failed_stage"] = r.failed_stage;
    j["error"] = r.error;
  }
  const Provenance& p = r.provenance;
  j["provenance"] = {{"version", p.version},
                     {"config_hash", p.config_hash},
                     {"seed", p.seed},
                     {"grid_points", p.grid_points},
                     {"tolerance_mw", p.tolerance_mw},
                     {"plateau_tolerance", p.plateau_tolerance},
                     {"zero_profit_tolerance", p.zero_profit_tolerance},
                     {"psi", p.psi},
                     {"risk_free_rate", p.risk_free_rate},
                     {"study_delta", p.study_delta},
                     {"deltas", p.deltas},
                     {"mechanisms", p.mechanisms},
                     {"cost_incidence", p.incidence},
                     {"target_mw", p.target_mw},
                     {"technology", p.technology},
                     {"fixed_cost", p.fixed_cost}};
  json outs = json::array();
  for (const auto& o : r.outcomes) outs.push_back(outcome_json(o));
  j["outcomes"] = outs;
  json t1 = json::object();
  t1["deltas"] = r.table1.deltas;
  json rows = json::array();
  for (const auto& [name, v] : r.table1.rows) rows.push_back({{"metric", name}, {"values", v}});
  t1["rows"] = rows;
  j["table1"] = t1;
  json t2 = json::array();
  for (const auto& x : r.table2) {
    t2.push_back({{"mechanism", x.mechanism},
                  {"cv", opt(x.cv)},
                  {"min_irr", x.min_irr},
                  {"cvar_irr", x.cvar_irr},
                  {"implied_wacc", x.implied_wacc}});
  }
  j["table2"] = t2;
  json t3 = json::array();
  for (const auto& x : r.table3) {
    t3.push_back({{"mechanism", x.mechanism},
                  {"parameter", x.parameter},
                  {"unit", x.unit},
                  {"ldes_gw", x.ldes_gw},
                  {"cost_installed", x.cost_installed},
                  {"cost_incentivized", opt(x.cost_incentivized)}});
  }
  j["table3"] = t3;
  json cs = json::array();
  for (const auto& x : r.cs_index) {
    cs.push_back({{"mechanism", x.mechanism},
                  {"incidence", x.incidence},
                  {"mean_cs", x.mean_cs},
                  {"cvar_cs", x.cvar_cs},
                  {"mean_index", opt(x.mean_index)},
                  {"cvar_index", opt(x.cvar_index)}});
  }
  j["cs_index"] = cs;
  json cal = json::array();
  for (const auto& x : r.calibrations) {
    cal.push_back({{"mechanism", x.mechanism},
                   {"contract", x.contract},
                   {"parameter", x.parameter},
                   {"target_mw", x.target_mw},
                   {"capacity_mw", x.capacity_mw},
                   {"residual_mw", x.residual_mw},
                   {"grid_step_mw", x.grid_step_mw},
                   {"rho_at_target", x.rho_at_target},
                   {"iterations", x.iterations},
                   {"curve", curve_json(x.curve)}});
  }
  j["calibrations"] = cal;
  json sw = json::object();
  for (const auto& [name, rows2] : r.sweeps) {
    json a = json::array();
    for (const auto& x : rows2) {
      a.push_back({{"delta", x.delta},
                   {"parameter", x.parameter},
                   {"ldes_gw", x.ldes_gw},
                   {"cost_installed", x.cost_installed},
                   {"cost_incentivized", opt(x.cost_incentivized)},
                   {"implied_wacc", x.implied_wacc}});
    }
    sw[name] = a;
  }
  j["sweeps"] = sw;
  return j.dump(2) + "\n";
}

StudyReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("result file: ") + e.what());
  }
  try {
    if (j.value("format", "") != "ldes-study/1") throw ParseError("result file: unknown format");
    StudyReport r;
    r.status = j.at("status").get<std::string>();
    r.failed_stage = j.value("failed_stage", "");
    r.error = j.value("error", "");
    const json& p = j.at("provenance");
    Provenance& pv = r.provenance;
    pv.version = p.at("version").get<std::string>();
    pv.config_hash = p.at("config_hash").get<std::string>();
    pv.seed = p.at("seed").get<std::uint64_t>();
    pv.grid_points = p.at("grid_points").get<int>();
    pv.tolerance_mw = p.at("tolerance_mw").get<double>();
    pv.plateau_tolerance = p.at("plateau_tolerance").get<double>();
    pv.zero_profit_tolerance = p.at("zero_profit_tolerance").get<double>();
    pv.psi = p.at("psi").get<double>();
    pv.risk_free_rate = p.at("risk_free_rate").get<double>();
    pv.study_delta = p.at("study_delta").get<double>();
    pv.deltas = p.at("deltas").get<std::vector<double>>();
    pv.mechanisms = p.at("mechanisms").get<std::vector<std::string>>();
    pv.incidence = p.at("cost_incidence").get<std::string>();
    pv.target_mw = p.at("target_mw").get<double>();
    pv.technology = p.at("technology").get<std::string>();
    pv.fixed_cost = p.at("fixed_cost").get<double>();
    for (const auto& o : j.at("outcomes")) r.outcomes.push_back(outcome_from(o));
    r.table1.deltas = j.at("table1").at("deltas").get<std::vector<double>>();
    for (const auto& row : j.at("table1").at("rows")) {
      r.table1.rows.emplace_back(row.at("metric").get<std::string>(), row.at("values").get<std::vector<double>>());
    }
    for (const auto& x : j.at("table2")) {
      r.table2.push_back({x.at("mechanism").get<std::string>(), get_opt(x.at("cv")), x.at("min_irr").get<double>(),
                          x.at("cvar_irr").get<double>(), x.at("implied_wacc").get<double>()});
    }
    for (const auto& x : j.at("table3")) {
      r.table3.push_back({x.at("mechanism").get<std::string>(), x.at("parameter").get<double>(),
                          x.at("unit").get<std::string>(), x.at("ldes_gw").get<double>(),
                          x.at("cost_installed").get<double>(), get_opt(x.at("cost_incentivized"))});
    }
    for (const auto& x : j.at("cs_index")) {
      r.cs_index.push_back({x.at("mechanism").get<std::string>(), x.at("incidence").get<std::string>(),
                            x.at("mean_cs").get<double>(), x.at("cvar_cs").get<double>(), get_opt(x.at("mean_index")),
                            get_opt(x.at("cvar_index"))});
    }
    for (const auto& x : j.at("calibrations")) {
      CalibrationRecord c;
      c.mechanism = x.at("mechanism").get<std::string>();
      c.contract = x.at("contract").get<std::string>();
      c.parameter = x.at("parameter").get<double>();
      c.target_mw = x.at("target_mw").get<double>();
      c.capacity_mw = x.at("capacity_mw").get<double>();
      c.residual_mw = x.at("residual_mw").get<double>();
      c.grid_step_mw = x.at("grid_step_mw").get<double>();
      c.rho_at_target = x.at("rho_at_target").get<double>();
      c.iterations = x.at("iterations").get<int>();
      c.curve = curve_from(x.at("curve"));
      r.calibrations.push_back(c);
    }
    for (const auto& [name, rows] : j.at("sweeps").items()) {
      auto& out = r.sweeps[name];
      for (const auto& x : rows) {
        out.push_back({x.at("delta").get<double>(), x.at("parameter").get<double>(), x.at("ldes_gw").get<double>(),
                       x.at("cost_installed").get<double>(), get_opt(x.at("cost_incentivized")),
                       x.at("implied_wacc").get<double>()});
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("result file: ") + e.what());
  }
}

// ---- CSV ----

std::string table1_csv(const Table1& t) {
  std::ostringstream os;
  os << "metric";
  for (double d : t.deltas) os << "," << delta_label(d);
  os << "\n";
  for (const auto& [name, v] : t.rows) {
    os << name;
    for (double x : v) os << "," << fixed(x);
    os << "\n";
  }
  return os.str();
}

namespace {

std::string table2_csv(const std::vector<Table2Row>& rows) {
  std::ostringstream os;
  os << "mechanism,cv,min_irr_pct,cvar_irr_pct,implied_wacc_pct\n";
  for (const auto& r : rows) {
    os << r.mechanism << "," << fixed(r.cv) << "," << fixed(100.0 * r.min_irr) << "," << fixed(100.0 * r.cvar_irr)
       << "," << fixed(100.0 * r.implied_wacc) << "\n";
  }
  return os.str();
}

std::string table3_csv(const std::vector<Table3Row>& rows) {
  std::ostringstream os;
  os << "mechanism,parameter,unit,ldes_gw,cost_installed_pct,cost_incentivized_pct\n";
  for (const auto& r : rows) {
    std::optional<double> inc;
    if (r.cost_incentivized) inc = 100.0 * *r.cost_incentivized;
    os << r.mechanism << "," << fixed(r.parameter) << "," << r.unit << "," << fixed(r.ldes_gw) << ","
       << fixed(100.0 * r.cost_installed) << "," << fixed(inc) << "\n";
  }
  return os.str();
}

std::string cs_csv(const std::vector<CsRow>& rows) {
  std::ostringstream os;
  os << "mechanism,incidence,mean_cs,cvar_cs,mean_index,cvar_index\n";
  for (const auto& r : rows) {
    os << r.mechanism << "," << r.incidence << "," << fixed(r.mean_cs) << "," << fixed(r.cvar_cs) << ","
       << fixed(r.mean_index) << "," << fixed(r.cvar_index) << "\n";
  }
  return os.str();
}

std::string irr_cdf_csv(const Outcome& o) {
  std::vector<std::size_t> idx(o.irr.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return o.irr[a] < o.irr[b]; });
  std::ostringstream os;
  os << "mechanism,kind,scenario,irr_pct,cdf,finite\n";
  double cum = 0.0;
  for (std::size_t i : idx) {
    cum += o.probabilities[i];
    os << o.label << ",scenario," << o.scenarios[i] << "," << fixed(100.0 * o.irr[i]) << "," << fixed(cum) << ","
       << (o.irr_finite[i] ? 1 : 0) << "\n";
  }
  os << o.label << ",implied_wacc,," << fixed(100.0 * o.implied_wacc) << ",NA,1\n";
  return os.str();
}

std::string payouts_csv(const Outcome& o, double F) {
  std::ostringstream os;
  os << "mechanism,kind,scenario,payout_usd_per_mw,payout_pct_of_fixed_cost\n";
  auto line = [&](const char* kind, const std::string& sc, double v) {
    os << o.label << "," << kind << "," << sc << "," << fixed(v) << "," << fixed(100.0 * v / F) << "\n";
  };
  for (std::size_t s = 0; s < o.payoff.size(); ++s) line("sample", o.scenarios[s], o.payoff[s]);
  line("mean", "", mean_of(o.payoff, o.probabilities));
  line("median", "", weighted_median(o.payoff, o.probabilities));
  return os.str();
}

std::string sweep_csv(const std::string& name, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "mechanism,delta,parameter,ldes_gw,cost_installed_pct,cost_incentivized_pct,implied_wacc_pct\n";
  for (const auto& r : rows) {
    std::optional<double> inc;
    if (r.cost_incentivized) inc = 100.0 * *r.cost_incentivized;
    os << name << "," << delta_label(r.delta) << "," << fixed(r.parameter) << "," << fixed(r.ldes_gw) << ","
       << fixed(100.0 * r.cost_installed) << "," << fixed(inc) << "," << fixed(100.0 * r.implied_wacc) << "\n";
  }
  return os.str();
}

}  // namespace

std::map<std::string, std::string> render_files(const StudyReport& r, bool csv, bool with_json) {
  std::map<std::string, std::string> files;
  if (with_json) files["result.json"] = to_json(r);
  if (!csv) return files;
  if (!r.table1.rows.empty()) files["table1.csv"] = table1_csv(r.table1);
  if (!r.table2.empty()) files["table2.csv"] = table2_csv(r.table2);
  if (!r.table3.empty()) files["table3.csv"] = table3_csv(r.table3);
  if (!r.cs_index.empty()) files["cs_index.csv"] = cs_csv(r.cs_index);
  for (const auto& o : r.outcomes) {
    if (o.delta != r.provenance.study_delta && o.label != "risk-neutral") continue;
    files["irr_cdf_" + o.label + ".csv"] = irr_cdf_csv(o);
  }
  for (const auto& c : r.calibrations) {
    const Outcome* o = find_outcome(r, c.mechanism, r.provenance.study_delta);
    if (!o) continue;
    files["payouts_" + c.mechanism + ".csv"] = payouts_csv(*o, r.provenance.fixed_cost);
  }
  for (const auto& [name, rows] : r.sweeps) files["sweep_" + name + ".csv"] = sweep_csv(name, rows);
  return files;
}

void write_report(const StudyReport& r, const std::string& dir, bool csv) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : render_files(r, csv, true)) {
    text::write_file((std::filesystem::path(dir) / name).string(), content);
  }
  const auto marker = std::filesystem::path(dir) / "INCOMPLETE";
  if (r.status != "complete") {
    text::write_file(marker.string(), "stage: " + r.failed_stage + "\nerror: " + r.error + "\n");
  } else if (std::filesystem::exists(marker)) {
    std::filesystem::remove(marker);
  }
}

}  // namespace ldes
