#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dispatch_oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "ldes/dispatch.hpp"
#include "ldes/errors.hpp"
#include "ldes/synthetic.hpp"

using namespace ldes;
using doctest::Approx;
using fixtures::micro;
using oracle::grid_oracle;
using oracle::grid_values;

namespace {

DispatchResult solve(const SystemConfig& c, const Capacities& caps = {}) {
  return solve_dispatch(build_dispatch(c, caps, c.scenarios.front()));
}

// Cheap step then a scarce one, 1 MW / 1 MWh storage at RTE 0.8, hourly weights.
SystemConfig two_step_storage() {
  SystemConfig c = micro({1.0, 1.0}, {50.0, 150.0},
                         {fixtures::storage("ldes", 1.0, 1.0, 0.8), fixtures::thermal("gas", 10.0, 100.0)});
  return c;
}

DispatchResult handmade(std::vector<double> weights, std::vector<double> prices) {
  DispatchResult r;
  r.weights = std::move(weights);
  r.prices = std::move(prices);
  return r;
}

}  // namespace

TEST_CASE("build: one step, one thermal unit") {
  const SystemConfig c = micro({8760.0}, {80.0}, {fixtures::thermal("gas", 10.0, 100.0)});
  const DispatchProblem p = build_dispatch(c, {}, c.scenarios.front());
  CHECK(p.block.balance_rows.size() == 1);
  const int q = p.block.output[0][0];
  CHECK(p.model.column_lower(q) == 0.0);
  CHECK(p.model.column_upper(q) == 100.0);
  for (int j = 0; j < p.model.num_columns(); ++j) CHECK(p.model.column_lower(j) == 0.0);
}

TEST_CASE("build: 10 MW of 12-hour storage holds 120 MWh") {
  SystemConfig c = micro({1.0, 1.0}, {5.0, 5.0}, {fixtures::storage("ldes", 10.0, 12.0, 0.64)});
  const DispatchProblem p = build_dispatch(c, {}, c.scenarios.front());
  for (int col : p.block.soc[0]) CHECK(p.model.column_upper(col) == 120.0);
  for (int col : p.block.charge[0]) CHECK(p.model.column_upper(col) == 10.0);
  for (int col : p.block.output[0]) CHECK(p.model.column_upper(col) == 10.0);
}

TEST_CASE("build: zero capacity everywhere still solves by shedding") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  Capacities caps;
  for (const auto& t : c.technologies) {
    if (!t.cap_fixed) caps[t.name] = 0.0;
  }
  const DispatchResult r = solve_dispatch(build_dispatch(c, caps, c.scenarios[0]));
  CHECK(r.welfare > 0.0);
}

TEST_CASE("build: bad inputs are rejected") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  CHECK_THROWS_AS(build_dispatch(c, {{"hydro", 10.0}}, c.scenarios[0]), ValidationError);
  CHECK_THROWS_AS(build_dispatch(c, {{"ldes", -1.0}}, c.scenarios[0]), ValidationError);
  SystemConfig bad = c;
  bad.scenarios[0].demand_mw.pop_back();
  CHECK_THROWS_AS(build_dispatch(bad, {}, bad.scenarios[0]), ValidationError);
}

TEST_CASE("solve: interior demand clears at the marginal cost") {
  const SystemConfig c = micro({8760.0}, {80.0}, {fixtures::thermal("gas", 10.0, 100.0)});
  const DispatchResult r = solve(c);
  CHECK(r.dispatch.at("gas")[0] == Approx(80.0));
  CHECK(r.prices[0] == Approx(10.0));
  CHECK(r.unmet_demand_mwh == Approx(0.0));
  CHECK(r.consumer_surplus == Approx(19990.0 * 80.0 * 8760.0));
}

TEST_CASE("solve: shortage sets the price cap") {
  const SystemConfig c = micro({8760.0}, {120.0}, {fixtures::thermal("gas", 10.0, 100.0)});
  const DispatchResult r = solve(c);
  CHECK(r.dispatch.at("gas")[0] == Approx(100.0));
  CHECK(r.unmet_demand_mwh == Approx(20.0 * 8760.0));
  CHECK(r.prices[0] == Approx(20000.0));
  // Scarcity hours leave nothing to inelastic consumers.
  CHECK(r.consumer_surplus == Approx(0.0).epsilon(1e-9));
}

TEST_CASE("solve: storage shifts energy from the cheap to the scarce step") {
  const SystemConfig c = two_step_storage();
  const DispatchResult r = solve(c);
  REQUIRE(r.prices[0] == Approx(10.0));
  REQUIRE(r.prices[1] == Approx(20000.0));
  CHECK(r.charge.at("ldes")[0] == Approx(1.0));
  CHECK(r.dispatch.at("ldes")[1] == Approx(0.8));
  // Brute force over the charge level on a 0.01 MWh grid: what is
  // charged at 10 comes back at RTE 0.8 against the cap.
  double best_gain = 0.0, best_charge = 0.0;
  for (double ch : grid_values(1.0, 0.01)) {
    const double gain = 0.8 * ch * c.demand.price_cap - 10.0 * ch;
    if (gain > best_gain) best_gain = gain, best_charge = ch;
  }
  CHECK(best_charge == Approx(1.0));
  SystemConfig empty = c;
  empty.technologies[0].cap_fixed = 0.0;
  const DispatchResult none = solve(empty);
  CHECK(r.welfare - none.welfare == Approx(best_gain));

  const Technology& ldes = c.technology("ldes");
  CHECK(net_revenue(r, ldes, 1.0) == Approx(15990.0));
  const StorageStats s = storage_stats(r, ldes, 1.0);
  CHECK(s.v == Approx(0.8));
  CHECK(s.sigma == Approx(19987.5));
  CHECK(s.tau == Approx(1.0));
  CHECK(r.net_revenue_per_mw.at("ldes") == Approx(15990.0));
}

TEST_CASE("net revenue and storage statistics by formula") {
  Technology gen = fixtures::thermal("g", 10.0, 100.0);
  DispatchResult r = handmade({8760.0}, {50.0});
  r.dispatch["g"] = {100.0};
  CHECK(net_revenue(r, gen, 100.0) == Approx(40.0 * 8760.0));
  r.dispatch["g"] = {0.0};
  CHECK(net_revenue(r, gen, 100.0) == 0.0);
  CHECK_THROWS(net_revenue(r, gen, 0.0));

  Technology st = fixtures::storage("s", 1.0, 4.0, 0.8);
  DispatchResult idle = handmade({4380.0, 4380.0}, {10.0, 90.0});
  idle.dispatch["s"] = {0.0, 0.0};
  idle.charge["s"] = {0.0, 0.0};
  StorageStats z = storage_stats(idle, st, 1.0);
  CHECK(z.v == 0.0);
  CHECK(z.sigma == 0.0);
  CHECK(z.tau == 0.0);

  DispatchResult half = idle;
  half.charge["s"] = {1.0, 0.0};
  StorageStats hs = storage_stats(half, st, 1.0);
  CHECK(hs.tau == Approx(0.5));
  CHECK(hs.v == 0.0);
  CHECK(hs.sigma == 0.0);
  CHECK_THROWS(storage_stats(half, gen, 1.0));
}

TEST_CASE("consumer surplus equals utility integral minus payments") {
  SystemConfig c = micro({3.0, 5.0}, {60.0, 140.0}, {fixtures::thermal("gas", 35.0, 120.0)}, 30.0);
  c.demand.flexible_bid = 200.0;
  c.demand.price_cap = 3000.0;
  const DispatchResult r = solve(c);
  double oracle = 0.0;
  for (std::size_t t = 0; t < 2; ++t) {
    const double served = r.served_inelastic[t] + r.served_flexible[t];
    const int n = static_cast<int>(served / 1e-5);
    const double dx = served / n;
    double utility = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * dx;
      utility += (x <= c.scenarios[0].demand_mw[t] ? c.demand.price_cap : c.demand.flexible_bid) * dx;
    }
    oracle += c.time_grid.weights[t] * (utility - r.prices[t] * served);
  }
  CHECK(r.consumer_surplus == Approx(oracle).epsilon(1e-6));
  CHECK(consumer_surplus(r, c.demand) == r.consumer_surplus);
}

TEST_CASE("grid search agrees with the LP on small instances") {
  std::mt19937_64 rng(97);
  std::uniform_int_distribution<int> cents(1, 40);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t T = trial < 6 ? 2 : 3;
    // Storage at RTE 0.5 keeps its vertices on the grid when the data sit
    // on multiples of 0.02.
    const double unit = trial % 3 == 2 ? 0.02 : 0.01;
    std::vector<double> weights, demand;
    for (std::size_t t = 0; t < T; ++t) {
      weights.push_back(1.0 + std::floor(4.0 * u(rng)));
      demand.push_back(cents(rng) * unit);
    }
    std::vector<Technology> techs{fixtures::thermal("base", 5.0 + 20.0 * u(rng), cents(rng) * unit)};
    switch (trial % 3) {
      case 0: techs.push_back(fixtures::thermal("peak", 40.0 + 40.0 * u(rng), cents(rng) * 0.01)); break;
      case 1: techs.push_back(fixtures::renewable("wind", cents(rng) * 0.04)); break;
      default: techs.push_back(fixtures::storage("store", 0.1, 1.0 + std::floor(2.0 * u(rng)), 0.5)); break;
    }
    SystemConfig c = micro(weights, demand, techs, 0.04);
    c.demand.price_cap = 500.0;
    c.demand.flexible_bid = 60.0;
    if (trial % 3 == 1) {
      auto& cf = c.scenarios[0].capacity_factors["wind"];
      for (double& v : cf) v = 0.25 * std::floor(4.0 * u(rng) + 1.0);
    }
    CAPTURE(trial);
    const DispatchResult r = solve(c);
    const double oracle = grid_oracle(c);
    CHECK(oracle <= r.welfare + 1e-9 * std::abs(r.welfare));
    CHECK(r.welfare - oracle <= 1e-3 * std::abs(r.welfare));
  }
}

TEST_CASE("strong duality and price bounds on the desk-scale instance") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  for (const auto& sc : c.scenarios) {
    const DispatchProblem p = build_dispatch(c, {{"ldes", 3000.0}, {"solar", 20000.0}, {"onshore", 15000.0}}, sc);
    lp::Simplex s(p.model);
    REQUIRE(s.solve() == lp::Status::Optimal);
    const lp::Model& m = p.model;
    std::vector<double> y(m.num_rows());
    double dual = 0.0;
    for (int i = 0; i < m.num_rows(); ++i) {
      y[i] = s.row_dual(i);
      if (y[i] > 1e-9) {
        REQUIRE(std::isfinite(m.row_lower(i)));
        dual += y[i] * m.row_lower(i);
      } else if (y[i] < -1e-9) {
        REQUIRE(std::isfinite(m.row_upper(i)));
        dual += y[i] * m.row_upper(i);
      }
    }
    for (int j = 0; j < m.num_columns(); ++j) {
      double d = m.cost(j);
      for (const auto& e : m.column(j)) d -= e.value * y[e.index];
      const double scale = 1e-9 * std::max(1.0, std::abs(m.cost(j)));
      if (d > scale) {
        dual += d * m.column_lower(j);
      } else if (d < -scale) {
        REQUIRE(std::isfinite(m.column_upper(j)));
        dual += d * m.column_upper(j);
      }
    }
    const double primal = s.objective();
    CHECK(std::abs(primal - dual) <= 1e-6 * std::abs(primal));

    const DispatchResult r = solve_dispatch(p);
    CHECK(r.welfare == Approx(-primal).epsilon(1e-9));
    for (double price : r.prices) {
      CHECK(price >= -1e-6);
      CHECK(price <= c.demand.price_cap + 1e-6);
    }
  }
}

TEST_CASE("merit order sets prices without storage") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 300);
  std::vector<Technology> techs{fixtures::thermal("a", 10.0, 100.0), fixtures::thermal("b", 30.0, 80.0),
                                fixtures::thermal("c", 75.0, 60.0)};
  std::vector<double> weights, demand;
  for (int t = 0; t < 40; ++t) {
    weights.push_back(219.0);
    demand.push_back(level(rng) + 0.5);
  }
  const SystemConfig c = micro(weights, demand, techs);
  const DispatchResult r = solve(c);
  for (std::size_t t = 0; t < demand.size(); ++t) {
    double expected = c.demand.price_cap, cum = 0.0;
    for (const auto& tech : techs) {
      cum += *tech.cap_fixed;
      if (demand[t] < cum) {
        expected = tech.var_cost;
        break;
      }
    }
    CAPTURE(demand[t]);
    CHECK(r.prices[t] == Approx(expected));
  }
}

TEST_CASE("storage conserves energy and every step balances") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  const Technology& ldes = c.technology("ldes");
  for (const auto& sc : c.scenarios) {
    const DispatchResult r = solve_dispatch(build_dispatch(c, {{"ldes", 5000.0}}, sc));
    const auto& ch = r.charge.at("ldes");
    const auto& dis = r.dispatch.at("ldes");
    double charged = 0.0, discharged = 0.0;
    for (std::size_t t = 0; t < ch.size(); ++t) {
      charged += ch[t];
      discharged += dis[t];
    }
    CHECK(std::abs(discharged - ldes.round_trip_efficiency * charged) <= 1e-6 * std::max(1.0, charged));
    CHECK(r.state_of_charge.at("ldes").back() == Approx(0.5 * 12.0 * 5000.0));

    for (std::size_t t = 0; t < ch.size(); ++t) {
      double net = 0.0;
      for (const auto& [name, q] : r.dispatch) net += q[t];
      for (const auto& [name, q] : r.charge) net -= q[t];
      CHECK(std::abs(net - r.served_demand[t]) <= 1e-6);
    }
  }
}

TEST_CASE("doubling the weights doubles welfare, revenues and surplus") {
  SystemConfig c = default_gb_config(1, 24, 7);
  SystemConfig d = c;
  for (double& w : d.time_grid.weights) w *= 2.0;
  const Capacities caps{{"ldes", 4000.0}};
  const DispatchResult a = solve_dispatch(build_dispatch(c, caps, c.scenarios[1]));
  const DispatchResult b = solve_dispatch(build_dispatch(d, caps, d.scenarios[1]));
  CHECK(b.welfare == Approx(2.0 * a.welfare).epsilon(1e-12));
  CHECK(b.consumer_surplus == Approx(2.0 * a.consumer_surplus).epsilon(1e-9));
  for (const auto& [name, v] : a.net_revenue_per_mw) {
    CAPTURE(name);
    CHECK(b.net_revenue_per_mw.at(name) == Approx(2.0 * v).epsilon(1e-9).scale(1.0));
  }
  for (std::size_t t = 0; t < a.prices.size(); ++t) CHECK(b.prices[t] == Approx(a.prices[t]).epsilon(1e-9));
}

TEST_CASE("repeated solves give identical prices") {
  const SystemConfig c = default_gb_config(2, 48, 3);
  for (const auto& sc : c.scenarios) {
    const DispatchProblem p = build_dispatch(c, {{"ldes", 2500.0}}, sc);
    const DispatchResult a = solve_dispatch(p);
    const DispatchResult b = solve_dispatch(p);
    CHECK(a.prices == b.prices);
    CHECK(a.net_revenue_per_mw == b.net_revenue_per_mw);
  }
}

TEST_CASE("dispatch CSV has one row per scenario step") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  std::vector<DispatchResult> rs;
  for (const auto& sc : c.scenarios) rs.push_back(solve_dispatch(build_dispatch(c, {}, sc)));
  std::ostringstream os;
  write_dispatch_csv(os, rs);
  const std::string s = os.str();
  CHECK(s.rfind("scenario,step,weight,price,demand,served,unmet", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 24);
}
