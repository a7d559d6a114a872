#include "ldes/dispatch.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "ldes/errors.hpp"
#include "ldes/text.hpp"

namespace ldes {

namespace {

std::string idx(const std::string& base, std::size_t t) { return base + "_" + std::to_string(t); }

// Column with upper bound `cap` (value) or a link row col - cap_col <= 0.
void bound_by_capacity(lp::Model& m, int col, const CapacityRef& cap, double factor, const std::string& name) {
  if (cap.column < 0) {
    m.set_column_bounds(col, 0.0, factor * cap.value);
    return;
  }
  const int row = m.add_row(-lp::kInf, 0.0, name);
  m.add_coefficient(row, col, 1.0);
  m.add_coefficient(row, cap.column, -factor);
}

}  // namespace

ScenarioBlock add_scenario_block(lp::Model& m, const SystemConfig& config, std::size_t si,
                                 const std::vector<CapacityRef>& capacity, double weight,
                                 const std::string& prefix) {
  const Scenario& sc = config.scenarios.at(si);
  const TimeGrid& grid = config.time_grid;
  const std::size_t T = grid.steps();
  const std::size_t R = config.technologies.size();
  const DemandModel& dm = config.demand;
  if (sc.demand_mw.size() != T) {
    throw ValidationError("scenarios[" + sc.id + "].demand_mw", "profile length differs from time grid");
  }

  ScenarioBlock b;
  b.scenario = si;
  b.objective_weight = weight;
  b.output.resize(R);
  b.charge.resize(R);
  b.soc.resize(R);

  for (std::size_t t = 0; t < T; ++t) b.balance_rows.push_back(m.add_row(0.0, 0.0, idx(prefix + "bal", t)));

  for (std::size_t t = 0; t < T; ++t) {
    const double w = weight * grid.weights[t];
    const int d_in = m.add_column(-w * dm.price_cap, 0.0, sc.demand_mw[t], idx(prefix + "dem", t));
    const int d_fl = m.add_column(-w * dm.flexible_bid, 0.0, dm.flexible_mw, idx(prefix + "flex", t));
    m.add_coefficient(b.balance_rows[t], d_in, -1.0);
    m.add_coefficient(b.balance_rows[t], d_fl, -1.0);
    b.inelastic.push_back(d_in);
    b.flexible.push_back(d_fl);
  }

  // Renewables with equal variable cost share one output column per step.
  std::vector<double> pool_cost;
  for (std::size_t r = 0; r < R; ++r) {
    const Technology& tech = config.technologies[r];
    if (!tech.is_renewable()) continue;
    auto it = sc.capacity_factors.find(tech.name);
    if (it == sc.capacity_factors.end() || it->second.size() != T) {
      throw ValidationError("scenarios[" + sc.id + "].cf_" + tech.name, "missing or mismatched renewable profile");
    }
    const double vc = tech.variable_cost(sc.gas_price);
    std::size_t p = 0;
    while (p < pool_cost.size() && pool_cost[p] != vc) ++p;
    if (p == pool_cost.size()) {
      pool_cost.push_back(vc);
      b.pools.emplace_back();
    }
    b.pools[p].techs.push_back(r);
  }
  for (std::size_t p = 0; p < b.pools.size(); ++p) {
    auto& pool = b.pools[p];
    const std::string base = prefix + "vre" + std::to_string(p);
    for (std::size_t t = 0; t < T; ++t) {
      const double w = weight * grid.weights[t];
      double fixed_avail = 0.0;
      bool linked = false;
      for (std::size_t r : pool.techs) {
        const double cf = sc.capacity_factors.at(config.technologies[r].name)[t];
        if (capacity[r].column >= 0) {
          linked = linked || cf != 0.0;
        } else {
          fixed_avail += cf * capacity[r].value;
        }
      }
      const int col = m.add_column(w * pool_cost[p], 0.0, linked ? lp::kInf : fixed_avail, idx(base, t));
      m.add_coefficient(b.balance_rows[t], col, 1.0);
      if (linked) {
        const int row = m.add_row(-lp::kInf, fixed_avail, idx(base + "_avail", t));
        m.add_coefficient(row, col, 1.0);
        for (std::size_t r : pool.techs) {
          if (capacity[r].column < 0) continue;
          const double cf = sc.capacity_factors.at(config.technologies[r].name)[t];
          m.add_coefficient(row, capacity[r].column, -cf);
        }
      }
      pool.columns.push_back(col);
    }
  }

  for (std::size_t r = 0; r < R; ++r) {
    const Technology& tech = config.technologies[r];
    const CapacityRef& cap = capacity[r];
    if (tech.is_renewable()) continue;
    const double vc = tech.variable_cost(sc.gas_price);
    const std::string base = prefix + tech.name;
    if (!tech.is_storage()) {
      for (std::size_t t = 0; t < T; ++t) {
        const int col = m.add_column(weight * grid.weights[t] * vc, 0.0, lp::kInf, idx(base, t));
        bound_by_capacity(m, col, cap, 1.0, idx(base + "_cap", t));
        m.add_coefficient(b.balance_rows[t], col, 1.0);
        b.output[r].push_back(col);
      }
      continue;
    }
    const double dur = tech.storage_duration.value_or(0.0);
    const double eta = tech.round_trip_efficiency;
    const double dt = grid.step_hours;
    for (std::size_t t = 0; t < T; ++t) {
      const int ch = m.add_column(0.0, 0.0, lp::kInf, idx(base + "_ch", t));
      const int dis = m.add_column(weight * grid.weights[t] * vc, 0.0, lp::kInf, idx(base + "_dis", t));
      const int soc = m.add_column(0.0, 0.0, lp::kInf, idx(base + "_soc", t));
      bound_by_capacity(m, ch, cap, 1.0, idx(base + "_chcap", t));
      bound_by_capacity(m, dis, cap, 1.0, idx(base + "_discap", t));
      bound_by_capacity(m, soc, cap, dur, idx(base + "_soccap", t));
      m.add_coefficient(b.balance_rows[t], dis, 1.0);
      m.add_coefficient(b.balance_rows[t], ch, -1.0);
      b.charge[r].push_back(ch);
      b.output[r].push_back(dis);
      b.soc[r].push_back(soc);
    }
    // soc_t = soc_{t-1} + dt * (eta * ch_t - dis_t), cyclic.
    for (std::size_t t = 0; t < T; ++t) {
      const int row = m.add_row(0.0, 0.0, idx(base + "_soc_bal", t));
      m.add_coefficient(row, b.soc[r][t], 1.0);
      m.add_coefficient(row, b.soc[r][(t + T - 1) % T], -1.0);
      m.add_coefficient(row, b.charge[r][t], -dt * eta);
      m.add_coefficient(row, b.output[r][t], dt);
    }
    if (tech.initial_soc_fraction) {
      const double f = *tech.initial_soc_fraction;
      const int last = b.soc[r][T - 1];
      if (cap.column < 0) {
        const double e = f * dur * cap.value;
        m.set_column_bounds(last, e, e);
      } else {
        const int row = m.add_row(0.0, 0.0, base + "_soc_init");
        m.add_coefficient(row, last, 1.0);
        m.add_coefficient(row, cap.column, -f * dur);
      }
    }
  }
  return b;
}

DispatchResult extract_result(const SystemConfig& config, const ScenarioBlock& b,
                              const std::vector<double>& capacities, const std::function<double(int)>& x,
                              const std::function<double(int)>& y) {
  const Scenario& sc = config.scenarios.at(b.scenario);
  const TimeGrid& grid = config.time_grid;
  const std::size_t T = grid.steps();
  DispatchResult r;
  r.scenario_id = sc.id;
  r.probability = sc.probability;
  r.gas_price = sc.gas_price;
  r.weights = grid.weights;
  r.demand = sc.demand_mw;
  for (std::size_t k = 0; k < config.technologies.size(); ++k) {
    r.capacities[config.technologies[k].name] = capacities[k];
  }
  r.prices.resize(T);
  r.served_inelastic.resize(T);
  r.served_flexible.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double scale = b.objective_weight * grid.weights[t];
    r.prices[t] = scale > 0.0 ? y(b.balance_rows[t]) / scale : 0.0;
    r.served_inelastic[t] = x(b.inelastic[t]);
    r.served_flexible[t] = x(b.flexible[t]);
  }
  for (const auto& pool : b.pools) {
    for (std::size_t r_idx : pool.techs) {
      r.dispatch[config.technologies[r_idx].name].assign(T, 0.0);
      r.available[config.technologies[r_idx].name].assign(T, 0.0);
    }
    for (std::size_t t = 0; t < T; ++t) {
      double total = 0.0;
      for (std::size_t r_idx : pool.techs) {
        const Technology& tech = config.technologies[r_idx];
        const double a = sc.capacity_factors.at(tech.name)[t] * capacities[r_idx];
        r.available[tech.name][t] = a;
        total += a;
      }
      const double used = std::clamp(x(pool.columns[t]), 0.0, total);
      for (std::size_t r_idx : pool.techs) {
        const std::string& name = config.technologies[r_idx].name;
        r.dispatch[name][t] = total > 0.0 ? used * (r.available[name][t] / total) : 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < config.technologies.size(); ++k) {
    const Technology& tech = config.technologies[k];
    if (tech.is_renewable()) continue;
    auto& out = r.dispatch[tech.name];
    out.resize(T);
    for (std::size_t t = 0; t < T; ++t) out[t] = x(b.output[k][t]);
    if (tech.is_storage()) {
      auto& ch = r.charge[tech.name];
      auto& soc = r.state_of_charge[tech.name];
      ch.resize(T);
      soc.resize(T);
      for (std::size_t t = 0; t < T; ++t) {
        ch[t] = x(b.charge[k][t]);
        soc[t] = x(b.soc[k][t]);
      }
    }
  }
  refresh_metrics(r, config);
  return r;
}

void refresh_metrics(DispatchResult& r, const SystemConfig& config) {
  const std::size_t T = r.prices.size();
  r.served_demand.resize(T);
  double welfare = 0.0;
  double unmet = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double w = r.weights[t];
    r.served_demand[t] = r.served_inelastic[t] + r.served_flexible[t];
    welfare += w * (config.demand.price_cap * r.served_inelastic[t] + config.demand.flexible_bid * r.served_flexible[t]);
    unmet += w * std::max(0.0, r.demand[t] - r.served_inelastic[t]);
  }
  double curtailed = 0.0;
  r.net_revenue_per_mw.clear();
  r.storage_stats.clear();
  for (const auto& tech : config.technologies) {
    const auto& q = r.dispatch.at(tech.name);
    const double vc = tech.variable_cost(r.gas_price);
    for (std::size_t t = 0; t < T; ++t) welfare -= r.weights[t] * vc * q[t];
    if (tech.is_renewable()) {
      const auto& a = r.available.at(tech.name);
      for (std::size_t t = 0; t < T; ++t) curtailed += r.weights[t] * std::max(0.0, a[t] - q[t]);
    }
    const double cap = r.capacities.at(tech.name);
    if (cap > 0.0) {
      r.net_revenue_per_mw[tech.name] = net_revenue(r, tech, cap);
      if (tech.is_storage()) r.storage_stats[tech.name] = storage_stats(r, tech, cap);
    }
  }
  r.welfare = welfare;
  r.unmet_demand_mwh = unmet;
  r.curtailment_mwh = curtailed;
  r.consumer_surplus = consumer_surplus(r, config.demand);
}

DispatchResult blend(const DispatchResult& a, const DispatchResult& b, double theta, const SystemConfig& config) {
  auto mix = [theta](const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = theta * u[i] + (1.0 - theta) * v[i];
    return out;
  };
  DispatchResult r = a;
  r.prices = mix(a.prices, b.prices);
  r.served_inelastic = mix(a.served_inelastic, b.served_inelastic);
  r.served_flexible = mix(a.served_flexible, b.served_flexible);
  for (auto& [k, v] : r.dispatch) v = mix(a.dispatch.at(k), b.dispatch.at(k));
  for (auto& [k, v] : r.charge) v = mix(a.charge.at(k), b.charge.at(k));
  for (auto& [k, v] : r.state_of_charge) v = mix(a.state_of_charge.at(k), b.state_of_charge.at(k));
  for (auto& [k, v] : r.available) v = mix(a.available.at(k), b.available.at(k));
  for (auto& [k, v] : r.capacities) v = theta * a.capacities.at(k) + (1.0 - theta) * b.capacities.at(k);
  refresh_metrics(r, config);
  return r;
}

DispatchProblem build_dispatch(const SystemConfig& config, const Capacities& capacities, const Scenario& scenario) {
  std::size_t si = config.scenarios.size();
  for (std::size_t k = 0; k < config.scenarios.size(); ++k) {
    if (&config.scenarios[k] == &scenario || config.scenarios[k].id == scenario.id) {
      si = k;
      break;
    }
  }
  if (si == config.scenarios.size()) throw ValidationError("scenarios", "scenario '" + scenario.id + "' not in config");
  for (const auto& [name, value] : capacities) {
    if (!config.technology_index(name)) throw ValidationError("capacities." + name, "unknown resource");
    if (!(value >= 0.0)) throw ValidationError("capacities." + name, "capacity must be >= 0");
  }
  DispatchProblem p;
  p.config = &config;
  p.scenario_id = scenario.id;
  std::vector<CapacityRef> refs;
  for (const auto& tech : config.technologies) {
    double v = 0.0;
    if (tech.cap_fixed) {
      v = *tech.cap_fixed;
    }
    if (auto it = capacities.find(tech.name); it != capacities.end()) {
      if (tech.cap_fixed && it->second != *tech.cap_fixed) {
        throw ValidationError("capacities." + tech.name, "technology has a fixed capacity");
      }
      v = it->second;
    }
    p.capacities.push_back(v);
    refs.push_back({v, -1});
  }
  p.block = add_scenario_block(p.model, config, si, refs, 1.0, "");
  return p;
}

DispatchResult solve_dispatch(const DispatchProblem& problem) {
  lp::Simplex s(problem.model);
  const lp::Status st = s.solve();
  if (st != lp::Status::Optimal) {
    throw NumericalError("dispatch LP for scenario " + problem.scenario_id + ": " + s.diagnostics());
  }
  return extract_result(
      *problem.config, problem.block, problem.capacities, [&](int j) { return s.column_value(j); },
      [&](int i) { return s.row_dual(i); });
}

double net_revenue(const DispatchResult& r, const Technology& tech, double capacity) {
  if (!(capacity > 0.0)) throw std::invalid_argument("net revenue per MW needs a positive capacity");
  const auto& q = r.dispatch.at(tech.name);
  const double vc = tech.variable_cost(r.gas_price);
  double s = 0.0;
  if (tech.is_storage()) {
    const auto& ch = r.charge.at(tech.name);
    for (std::size_t t = 0; t < q.size(); ++t) {
      s += r.weights[t] * (r.prices[t] * (q[t] - ch[t]) - vc * q[t]);
    }
  } else {
    for (std::size_t t = 0; t < q.size(); ++t) s += r.weights[t] * (r.prices[t] - vc) * q[t];
  }
  return s / capacity;
}

StorageStats storage_stats(const DispatchResult& r, const Technology& tech, double capacity) {
  if (!tech.is_storage()) throw std::invalid_argument("storage statistics for a non-storage resource");
  if (!(capacity > 0.0)) throw std::invalid_argument("storage statistics need a positive capacity");
  const auto& dis = r.dispatch.at(tech.name);
  const auto& ch = r.charge.at(tech.name);
  double energy = 0.0, spread_value = 0.0, active = 0.0, total = 0.0;
  for (std::size_t t = 0; t < dis.size(); ++t) {
    const double w = r.weights[t];
    energy += w * dis[t];
    spread_value += w * r.prices[t] * (dis[t] - ch[t]);
    total += w;
    if (ch[t] + dis[t] > kActivityEpsilon) active += w;
  }
  StorageStats s;
  s.v = energy / capacity;
  s.sigma = energy > 0.0 ? spread_value / energy : 0.0;
  s.tau = total > 0.0 ? active / total : 0.0;
  return s;
}

double consumer_surplus(const DispatchResult& r, const DemandModel& d) {
  double s = 0.0;
  for (std::size_t t = 0; t < r.prices.size(); ++t) {
    s += r.weights[t] * ((d.price_cap - r.prices[t]) * r.served_inelastic[t] +
                         (d.flexible_bid - r.prices[t]) * r.served_flexible[t]);
  }
  return s;
}

void write_dispatch_csv(std::ostream& os, const std::vector<DispatchResult>& results) {
  if (results.empty()) return;
  const DispatchResult& first = results.front();
  std::vector<std::string> gen, store;
  for (const auto& [k, _] : first.dispatch) gen.push_back(k);
  for (const auto& [k, _] : first.charge) store.push_back(k);
  os << "scenario,step,weight,price,demand,served,unmet";
  for (const auto& k : gen) os << ",gen_" << k;
  for (const auto& k : store) os << ",charge_" << k << ",soc_" << k;
  os << "\n";
  using text::num;
  for (const auto& r : results) {
    for (std::size_t t = 0; t < r.prices.size(); ++t) {
      os << r.scenario_id << ',' << t << ',' << num(r.weights[t]) << ',' << num(r.prices[t]) << ','
         << num(r.demand[t]) << ',' << num(r.served_demand[t]) << ','
         << num(std::max(0.0, r.demand[t] - r.served_inelastic[t]));
      for (const auto& k : gen) os << ',' << num(r.dispatch.at(k)[t]);
      for (const auto& k : store) os << ',' << num(r.charge.at(k)[t]) << ',' << num(r.state_of_charge.at(k)[t]);
      os << "\n";
    }
  }
}

}  // namespace ldes
