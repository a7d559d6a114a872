// Acceptance run: one PASS/FAIL line per criterion. Criterion 8 is a soft
// ordering check; a violation is printed with the instance but does not
// fail the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dispatch_oracle.hpp"
#include "fixtures.hpp"
#include "ldes/config_io.hpp"
#include "ldes/contracts.hpp"
#include "ldes/dispatch.hpp"
#include "ldes/equilibrium.hpp"
#include "ldes/expansion.hpp"
#include "ldes/report.hpp"
#include "ldes/risk.hpp"
#include "ldes/synthetic.hpp"
#include "ldes/text.hpp"

using namespace ldes;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "\n    violated: " << what;
    }
  }
};

int hard_failures = 0;

void report_line(int n, const std::string& title, Verdict& v, bool soft = false) {
  std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : soft ? "FAIL (soft)" : "FAIL") << "  " << title
            << v.detail.str() << "\n"
            << std::flush;
  if (!v.pass && !soft) ++hard_failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string desk_path() { return std::string(LDES_SOURCE_DIR) + "/data/desk/gb_desk.cfg"; }

// 1. Revenue CfD at 100% of F.
void criterion1() {
  Verdict v;
  std::ostringstream corners;
  const std::vector<std::pair<std::string, SystemConfig>> configs{{"desk", load_config(desk_path())},
                                                                   {"gb-1x24", default_gb_config(1, 24, 7)},
                                                                   {"gb-3x24", default_gb_config(3, 24, 11)}};
  for (const auto& [name, config] : configs) {
    Evaluator ev(config);
    InvestorProfile neutral = config.investor(config.contract_technology);
    neutral.delta = 1.0;
    const EquilibriumResult free = find_equilibrium(ev, std::nullopt, neutral);
    const double target = free.capacity;
    const Technology& tech = ev.contracted();
    const double F = tech.fixed_cost();
    // Zero cost follows from zero expected profit at the target. At a corner
    // with rent left over the contract recovers exactly that rent instead.
    const bool interior = free.selection == "crossing";
    const double expected_cost = interior ? 0.0 : -free.rho / F;
    if (!interior) {
      corners << "\n    note: " << name << " risk-neutral equilibrium is " << free.selection << " at "
              << text::num(target) << " MW with profit " << text::num(free.rho / F) << " F; cost checked against "
              << text::num(expected_cost) << " F";
    }
    for (double delta : {1.0, 0.6, 0.0}) {
      InvestorProfile p = neutral;
      p.delta = delta;
      GridSpec g;
      g.target_mw = target;
      const Contract k = RevenueCfD{1.0};
      const EquilibriumResult eq = find_equilibrium(ev, k, p, g);
      CashflowDistribution revenue, payoffs;
      std::vector<double> irrs;
      for (std::size_t s = 0; s < eq.exposures.size(); ++s) {
        const double settled = settled_revenue(&k, eq.exposures[s], tech, p.risk_free_rate);
        const IrrResult irr = scenario_irr(settled, tech, p.risk_free_rate);
        v.require(irr.finite && std::abs(irr.rate - p.risk_free_rate) <= 1e-6,
                  name + " delta " + text::num(delta) + ": scenario IRR " + text::num(irr.rate));
        revenue.values.push_back(settled);
        payoffs.values.push_back(payoff(k, eq.exposures[s], tech, p.risk_free_rate));
        revenue.probabilities.push_back(eq.per_scenario[s].probability);
        irrs.push_back(irr.rate);
      }
      payoffs.probabilities = revenue.probabilities;
      const RevenueStats st = revenue_stats(revenue, irrs);
      v.require(st.cv_defined && std::abs(st.cv) <= 1e-9, name + ": CV " + text::num(st.cv));
      const double cost = expected_mechanism_cost(payoffs, eq.capacity, 0.0, tech).per_mw_installed;
      v.require(std::abs(cost - expected_cost) <= 1e-9, name + " delta " + text::num(delta) + ": cost " + text::num(cost) + " F");
      v.require(eq.capacity == target, name + ": capacity " + text::num(eq.capacity) + " vs target " + text::num(target));
    }
  }
  v.detail << corners.str();
  report_line(1, "revenue CfD at 100% of F: IRR = risk-free, CV = 0, cost = 0 at interior targets", v);
}

// 2. Collar with equal floor and cap against the revenue CfD.
void criterion2() {
  Verdict v;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> pi(150000.0, 120000.0), sigma(300.0, 300.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Technology t = fixtures::storage("ldes", 1.0, 12.0, 0.64);
  t.invest_cost_annualized = 190000.0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ScenarioExposure e{pi(rng), sigma(rng), 4000.0 * u(rng), u(rng)};
    const double x = 2.0 * u(rng);
    const double a = payoff(CapFloor{x, x, StrikeUnit::FixedCostShare}, e, t, 0.071);
    const double b = payoff(RevenueCfD{x}, e, t, 0.071);
    worst = std::max(worst, std::abs(a - b));
  }
  v.require(worst <= 1e-12, "max |difference| " + text::num(worst));
  report_line(2, "CapFloor(x, x) equals RevenueCfD(x) on 10,000 exposures", v);
}

// 3. CVaR by sorting against the optimization form.
void criterion3() {
  Verdict v;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 40);
  std::normal_distribution<double> value(0.0, 1000.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int fractional = 0;
  for (int i = 0; i < 1000; ++i) {
    CashflowDistribution d;
    const int n = size(rng);
    const bool equal = i % 2 == 0;
    for (int k = 0; k < n; ++k) {
      d.values.push_back(value(rng));
      d.probabilities.push_back(equal ? 1.0 : 0.05 + u(rng));
    }
    double sum = 0.0;
    for (double p : d.probabilities) sum += p;
    for (double& p : d.probabilities) p /= sum;
    sum = 0.0;
    for (double p : d.probabilities) sum += p;
    d.probabilities.back() += 1.0 - sum;
    // Half the cases put psi strictly inside a scenario's mass.
    const double psi = equal ? (std::floor(u(rng) * n) + 0.5) / n : 0.01 + 0.99 * u(rng);
    if (equal) ++fractional;
    double best = -INFINITY;
    for (double zeta : d.values) {
      double shortfall = 0.0;
      for (int k = 0; k < n; ++k) shortfall += d.probabilities[k] * std::max(0.0, zeta - d.values[k]);
      best = std::max(best, zeta - shortfall / psi);
    }
    worst = std::max(worst, std::abs(cvar(d, psi) - best) / std::max(1.0, std::abs(best)));
  }
  v.require(worst <= 1e-9, "max relative difference " + text::num(worst));
  report_line(3, "CVaR sorting = optimization form on 1,000 distributions (" + std::to_string(fractional) +
                     " with fractional boundary)",
              v);
}

// 4. Dispatch LP on micro instances.
void criterion4() {
  Verdict v;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cents(1, 40);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int instances = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 1 + trial % 3;
    const int kind = (trial / 3) % 3;
    const double unit = kind == 2 ? 0.02 : 0.01;
    std::vector<double> weights, demand;
    for (std::size_t t = 0; t < T; ++t) {
      weights.push_back(1.0 + std::floor(4.0 * u(rng)));
      demand.push_back(cents(rng) * unit);
    }
    std::vector<Technology> techs{fixtures::thermal("base", 5.0 + 20.0 * u(rng), cents(rng) * unit)};
    if (kind == 0) techs.push_back(fixtures::thermal("peak", 40.0 + 40.0 * u(rng), cents(rng) * unit));
    if (kind == 1) techs.push_back(fixtures::renewable("wind", cents(rng) * 0.04));
    if (kind == 2) techs.push_back(fixtures::storage("store", 0.1, 1.0 + std::floor(2.0 * u(rng)), 0.5));
    SystemConfig c = fixtures::micro(weights, demand, techs, 0.04);
    c.demand.price_cap = 500.0;
    c.demand.flexible_bid = 60.0;
    if (kind == 1) {
      for (double& x : c.scenarios[0].capacity_factors["wind"]) x = 0.25 * std::floor(4.0 * u(rng) + 1.0);
    }
    const DispatchResult r = solve_dispatch(build_dispatch(c, {}, c.scenarios[0]));
    const double best = oracle::grid_oracle(c);
    ++instances;
    v.require(best <= r.welfare + 1e-9 * std::abs(r.welfare) && r.welfare - best <= 1e-3 * std::abs(r.welfare),
              "instance " + std::to_string(trial) + ": LP " + text::num(r.welfare) + " vs grid " + text::num(best));
  }

  // Merit order and scarcity.
  {
    std::vector<Technology> techs{fixtures::thermal("a", 10.0, 100.0), fixtures::thermal("b", 30.0, 80.0),
                                  fixtures::thermal("c", 75.0, 60.0)};
    std::vector<double> weights(60, 146.0), demand;
    std::uniform_int_distribution<int> level(0, 300);
    for (int t = 0; t < 60; ++t) demand.push_back(level(rng) + 0.5);
    const SystemConfig c = fixtures::micro(weights, demand, techs);
    const DispatchResult r = solve_dispatch(build_dispatch(c, {}, c.scenarios[0]));
    for (std::size_t t = 0; t < demand.size(); ++t) {
      double expected = c.demand.price_cap, cum = 0.0;
      for (const auto& tech : techs) {
        cum += *tech.cap_fixed;
        if (demand[t] < cum) {
          expected = tech.var_cost;
          break;
        }
      }
      v.require(std::abs(r.prices[t] - expected) <= 1e-9 * expected,
                "step " + std::to_string(t) + " price " + text::num(r.prices[t]) + " expected " + text::num(expected));
    }
    const SystemConfig scarce = fixtures::micro({8760.0}, {120.0}, {fixtures::thermal("gas", 10.0, 100.0)});
    const DispatchResult s = solve_dispatch(build_dispatch(scarce, {}, scarce.scenarios[0]));
    v.require(std::abs(s.prices[0] - 20000.0) <= 1e-9 * 20000.0, "scarcity price " + text::num(s.prices[0]));
  }

  // Storage energy conservation on the desk config.
  {
    const SystemConfig c = load_config(desk_path());
    const double eta = c.technology("ldes").round_trip_efficiency;
    const double eta_b = c.technology("battery").round_trip_efficiency;
    for (const auto& sc : c.scenarios) {
      const DispatchResult r = solve_dispatch(build_dispatch(c, {{"ldes", 12000.0}}, sc));
      for (const auto& [name, e] : {std::pair<std::string, double>{"ldes", eta}, {"battery", eta_b}}) {
        double ch = 0.0, dis = 0.0;
        for (double x : r.charge.at(name)) ch += x;
        for (double x : r.dispatch.at(name)) dis += x;
        v.require(std::abs(dis - e * ch) <= 1e-6 * std::max(1.0, ch),
                  sc.id + " " + name + ": discharged " + text::num(dis) + " vs RTE x charged " + text::num(e * ch));
      }
    }
  }
  report_line(4, "dispatch LP = grid oracle on " + std::to_string(instances) +
                     " micro instances; merit order, scarcity price, storage conservation",
              v);
}

// 5 needs the study's equilibria; the screening-curve part runs here.
void screening(Verdict& v) {
  const std::vector<double> hours{2000.0, 6760.0}, levels{100.0, 60.0};
  const Technology base = fixtures::investable_thermal("base", 10.0, 300000.0, 1000.0);
  const Technology peak = fixtures::investable_thermal("peak", 80.0, 50000.0, 1000.0);
  const SystemConfig c = fixtures::micro(hours, levels, {base, peak});
  const double crossover = (base.invest_cost_annualized - peak.invest_cost_annualized) / (peak.var_cost - base.var_cost);
  // Base covers the levels lasting longer than the crossover: 60 MW runs
  // 8760 h, the top 40 MW only 2000 h < crossover.
  const double base_mw = 8760.0 >= crossover ? (2000.0 >= crossover ? 100.0 : 60.0) : 0.0;
  const Capacities caps = risk_neutral_expansion(c, {});
  v.require(std::abs(caps.at("base") - base_mw) <= 10.0 && std::abs(caps.at("peak") - (100.0 - base_mw)) <= 10.0,
            "screening split base " + text::num(caps.at("base")) + " peak " + text::num(caps.at("peak")) +
                " vs " + text::num(base_mw) + "/" + text::num(100.0 - base_mw));
}

void criterion5(const StudyReport& study) {
  Verdict v;
  int checked = 0;
  double worst = 0.0;
  for (const auto& o : study.outcomes) {
    for (const auto& [name, r] : o.residuals) {
      ++checked;
      worst = std::max(worst, r);
      v.require(r <= 1e-3, o.label + " delta " + text::num(o.delta) + " " + name + ": residual " + text::num(r));
    }
  }
  screening(v);
  report_line(5, "complementarity residuals <= 0.1% of F (" + std::to_string(checked) + " checked, worst " +
                     text::num(worst) + "); screening-curve split",
              v);
}

void criterion6(const SystemConfig& desk) {
  Verdict v;
  const auto t0 = Clock::now();
  Evaluator ev(desk);
  const std::vector<double> deltas{1.0, 0.9, 0.8, 0.7, 0.6};
  const auto sweep = sweep_risk_aversion(ev, std::nullopt, desk.investor(desk.contract_technology), deltas);
  const double elapsed = seconds_since(t0);
  std::ostringstream row;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const Outcome o = summarize(desk, sweep[i], "none");
    row << " " << text::num(deltas[i]) << ":" << text::num(std::round(o.capacity_mw)) << "MW/"
        << text::num(std::round(o.implied_wacc * 1e4) / 100.0) << "%";
    if (i > 0) {
      const Outcome prev = summarize(desk, sweep[i - 1], "none");
      v.require(o.capacity_mw <= prev.capacity_mw + 1e-9, "capacity rises at delta " + text::num(deltas[i]));
      v.require(o.implied_wacc >= prev.implied_wacc - 1e-12, "implied WACC falls at delta " + text::num(deltas[i]));
    }
  }
  v.require(elapsed < 300.0, "sweep took " + text::num(elapsed) + " s");
  report_line(6, "risk-aversion sweep on the desk config (" + std::to_string(desk.scenarios.size()) + "x" +
                     std::to_string(desk.time_grid.steps()) + ", " + text::num(std::round(elapsed)) + " s):" + row.str(),
              v);
}

void criterion7(const StudyReport& study) {
  Verdict v;
  std::ostringstream row;
  v.require(study.calibrations.size() == 4, std::to_string(study.calibrations.size()) + " mechanisms calibrated");
  for (const auto& c : study.calibrations) {
    row << " " << c.mechanism << "=" << text::num(c.parameter) << "(" << text::num(std::round(c.residual_mw)) << "MW)";
    v.require(std::abs(c.residual_mw) <= c.grid_step_mw,
              c.mechanism + ": equilibrium " + text::num(c.capacity_mw) + " vs target " + text::num(c.target_mw));
    if (c.mechanism == "rcfd") v.require(std::abs(c.parameter - 1.0) <= 1e-9, "R-CfD strike " + text::num(c.parameter));
  }
  report_line(7, "calibration to the risk-neutral capacity within one grid step:" + row.str(), v);
}

void criterion8(const StudyReport& study) {
  Verdict v;
  std::map<std::string, double> cost;
  for (const auto& r : study.table3) cost[r.mechanism] = r.cost_installed;
  for (const char* m : {"rcfd", "scfd", "cf", "avc"}) {
    if (!cost.count(m)) v.require(false, std::string("missing ") + m);
  }
  if (v.pass) {
    std::ostringstream costs;
    for (const auto& r : study.table3) {
      costs << " " << r.mechanism << " " << text::num(std::round(r.cost_installed * 1e4) / 100.0) << "% of F at "
            << text::num(r.parameter) << " " << r.unit << " (" << text::num(r.ldes_gw) << " GW)";
    }
    v.require(std::abs(cost["rcfd"]) <= 1e-9, "R-CfD cost " + text::num(cost["rcfd"]));
    v.require(cost["rcfd"] <= cost["scfd"] + 1e-9, "R-CfD above S-CfD");
    v.require(cost["scfd"] <= cost["cf"], "S-CfD above C&F");
    v.require(cost["cf"] <= cost["avc"], "C&F above AvC");
    if (!v.pass) {
      v.detail << "\n    instance: " << desk_path() << " (hash " << study.provenance.config_hash << ", seed "
               << study.provenance.seed << "), delta " << text::num(study.provenance.study_delta) << ", target "
               << text::num(study.provenance.target_mw) << " MW\n    costs:" << costs.str();
      for (const auto& c : study.calibrations) {
        if (c.mechanism != "scfd") continue;
        v.detail << "\n    S-CfD equilibrium vs strike:";
        for (const auto& [p, mw] : c.curve) v.detail << " " << text::num(p) << "->" << text::num(std::round(mw));
      }
    } else {
      v.detail << costs.str();
    }
  }
  report_line(8, "mechanism cost ordering at delta 0.6: R-CfD = 0 <= S-CfD <= C&F <= AvC", v, true);
}

void criterion9(const StudyReport& first, const SystemConfig& desk, const StudySpec& spec) {
  Verdict v;
  Evaluator ev(desk);
  const StudyReport second = run_study(ev, spec);
  const fs::path base = fs::temp_directory_path() / ("ldes_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  write_report(first, (base / "a").string(), true);
  write_report(second, (base / "b").string(), true);
  int files = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    ++files;
    const std::string name = e.path().filename().string();
    const fs::path other = base / "b" / name;
    v.require(fs::exists(other) && text::read_file(e.path().string()) == text::read_file(other.string()),
              name + " differs");
  }
  int files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(base / "b")) ++files_b;
  v.require(files == files_b, "file counts " + std::to_string(files) + " vs " + std::to_string(files_b));
  fs::remove_all(base);
  report_line(9, "two runs give byte-identical result files (" + std::to_string(files) + " files)", v);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  auto guarded = [](int n, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      std::cout << "criterion " << n << ": FAIL  exception: " << e.what() << "\n";
      ++hard_failures;
    }
  };
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);

  const SystemConfig desk = load_config(desk_path());
  StudySpec spec;
  spec.mechanisms = {ContractFamily::RevenueCfD, ContractFamily::SpreadCfD, ContractFamily::CapFloor,
                     ContractFamily::Availability};
  StudyReport study;
  bool have_study = false;
  guarded(5, [&] {
    Evaluator ev(desk);
    std::string kind;
    study = run_study(ev, spec, &kind);
    if (study.status != "complete") throw std::runtime_error("study stopped at " + study.failed_stage + ": " + study.error);
    have_study = true;
    criterion5(study);
  });
  guarded(6, [&] { criterion6(desk); });
  guarded(7, [&] {
    if (!have_study) throw std::runtime_error("no study");
    criterion7(study);
  });
  guarded(8, [&] {
    if (!have_study) throw std::runtime_error("no study");
    criterion8(study);
  });
  guarded(9, [&] {
    if (!have_study) throw std::runtime_error("no study");
    criterion9(study, desk, spec);
  });
  std::cout << "acceptance: " << (hard_failures == 0 ? "all hard criteria met" : std::to_string(hard_failures) + " failed")
            << " in " << text::num(std::round(seconds_since(t0))) << " s\n";
  return hard_failures == 0 ? 0 : 1;
}
