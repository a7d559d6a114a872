#pragma once

// Scenario dispatch: welfare-maximizing operation of a fixed fleet over the
// representative time steps of one scenario, solved as an LP. Balance-row
// duals are the market prices.

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ldes/lp/model.hpp"
#include "ldes/lp/simplex.hpp"
#include "ldes/model.hpp"

namespace ldes {

using Capacities = std::map<std::string, double>;

// Storage operating statistics per MW installed.
struct StorageStats {
  double sigma = 0.0;  // realized spread, $/MWh discharged
  double v = 0.0;      // discharged energy, MWh/MW-yr
  double tau = 0.0;    // share of weighted hours charging or discharging
};

// Threshold for classifying a storage unit as active in a step.
inline constexpr double kActivityEpsilon = 1e-6;

struct DispatchResult {
  std::string scenario_id;
  double probability = 0.0;
  double gas_price = 0.0;
  std::vector<double> weights;
  Capacities capacities;

  std::vector<double> prices;
  // Generation (storage: discharge) per resource and step, MW.
  std::map<std::string, std::vector<double>> dispatch;
  std::map<std::string, std::vector<double>> charge;
  std::map<std::string, std::vector<double>> state_of_charge;
  // Renewable availability cf * capacity, MW.
  std::map<std::string, std::vector<double>> available;
  std::vector<double> demand;
  std::vector<double> served_inelastic;
  std::vector<double> served_flexible;
  std::vector<double> served_demand;

  double unmet_demand_mwh = 0.0;
  double curtailment_mwh = 0.0;
  double welfare = 0.0;
  double consumer_surplus = 0.0;
  std::map<std::string, double> net_revenue_per_mw;
  std::map<std::string, StorageStats> storage_stats;
};

// Column and row indices of one scenario inside an LP.
struct ScenarioBlock {
  std::size_t scenario = 0;
  double objective_weight = 1.0;
  std::vector<int> balance_rows;
  std::vector<int> inelastic;
  std::vector<int> flexible;
  // Per technology (config order); empty when not applicable.
  std::vector<std::vector<int>> output;
  std::vector<std::vector<int>> charge;
  std::vector<std::vector<int>> soc;
  struct Pool {
    std::vector<std::size_t> techs;
    std::vector<int> columns;
  };
  std::vector<Pool> pools;
};

// Capacity of a technology as seen by a block: a number, or an LP column.
struct CapacityRef {
  double value = 0.0;
  int column = -1;
};

// Adds the variables and rows of one scenario to `model`. Objective terms
// are scaled by `objective_weight` (the scenario probability in the
// two-stage problem). Objective sense is minimization of -welfare.
ScenarioBlock add_scenario_block(lp::Model& model, const SystemConfig& config, std::size_t scenario,
                                 const std::vector<CapacityRef>& capacity, double objective_weight,
                                 const std::string& prefix);

// Reads a solved block back. `x` gives column values and `y` row duals of
// the minimization problem.
DispatchResult extract_result(const SystemConfig& config, const ScenarioBlock& block,
                              const std::vector<double>& capacities,
                              const std::function<double(int)>& x, const std::function<double(int)>& y);

// Recomputes welfare, surplus and per-resource revenue statistics from the
// primal values and prices held in `r`.
void refresh_metrics(DispatchResult& r, const SystemConfig& config);

// theta * a + (1 - theta) * b for primal values and prices, then refreshed.
DispatchResult blend(const DispatchResult& a, const DispatchResult& b, double theta, const SystemConfig& config);

struct DispatchProblem {
  // The config must outlive the problem.
  const SystemConfig* config = nullptr;
  std::string scenario_id;
  std::vector<double> capacities;  // per technology, config order
  lp::Model model;
  ScenarioBlock block;
};

// Capacities default to cap_fixed; investable technologies missing from
// `capacities` get zero. Throws ValidationError for unknown resources,
// negative capacities or mismatched profile lengths.
DispatchProblem build_dispatch(const SystemConfig& config, const Capacities& capacities,
                               const Scenario& scenario);

// Throws NumericalError when the LP does not solve to optimality.
DispatchResult solve_dispatch(const DispatchProblem& problem);

// Net revenue per MW of installed capacity, $/MW-yr.
double net_revenue(const DispatchResult& result, const Technology& tech, double capacity);
StorageStats storage_stats(const DispatchResult& result, const Technology& tech, double capacity);
double consumer_surplus(const DispatchResult& result, const DemandModel& demand);

// One row per (scenario, step).
void write_dispatch_csv(std::ostream& os, const std::vector<DispatchResult>& results);

}  // namespace ldes
