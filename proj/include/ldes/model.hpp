#pragma once

// System data model: technologies, scenarios, the representative time grid,
// the demand side and investor risk preferences.
//
// Units: capacity MW, energy MWh, prices $/MWh, fixed costs $/MW-yr.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldes/contract.hpp"

namespace ldes {

enum class TechKind { Thermal, Renewable, Storage, NuclearFixed };

std::string_view to_string(TechKind k);
std::optional<TechKind> parse_tech_kind(std::string_view s);

struct Technology {
  std::string name;
  TechKind kind = TechKind::Thermal;
  double invest_cost_annualized = 0.0;
  // Not separated from capex in the published case data; defaults to zero.
  double fixed_om = 0.0;
  // Non-fuel variable cost. Gas-fired units add heat_rate * gas price.
  double var_cost = 0.0;
  bool fuel_indexed = false;
  double heat_rate = 0.0;
  double cap_max = 0.0;
  std::optional<double> cap_fixed;
  // Storage only: energy/power ratio in hours.
  std::optional<double> storage_duration;
  double round_trip_efficiency = 1.0;
  // Storage only: state of charge at the cyclic boundary as a share of the
  // energy capacity. Unset leaves the boundary state free.
  std::optional<double> initial_soc_fraction;
  int lifetime_years = 25;

  bool is_storage() const { return kind == TechKind::Storage; }
  bool is_renewable() const { return kind == TechKind::Renewable; }
  bool investable() const { return !cap_fixed.has_value(); }
  // Annualized fixed cost F = investment + fixed O&M.
  double fixed_cost() const { return invest_cost_annualized + fixed_om; }
  double variable_cost(double gas_price) const {
    return fuel_indexed ? var_cost + heat_rate * gas_price : var_cost;
  }
  double energy_capacity(double power_mw) const { return power_mw * storage_duration.value_or(0.0); }

  bool operator==(const Technology&) const = default;
};

struct Scenario {
  std::string id;
  double probability = 0.0;
  double gas_price = 0.0;
  std::vector<double> demand_mw;
  // Renewable technology name -> capacity factor per step.
  std::map<std::string, std::vector<double>> capacity_factors;

  bool operator==(const Scenario&) const = default;
};

struct TimeGrid {
  // Hours of the year represented by each step.
  std::vector<double> weights;
  // Chronological length of one step, used by the storage recursion.
  double step_hours = 1.0;

  std::size_t steps() const { return weights.size(); }
  double total_hours() const;
  static TimeGrid uniform(std::size_t steps, double year_hours = 8760.0);

  bool operator==(const TimeGrid&) const = default;
};

struct DemandModel {
  double price_cap = 20000.0;
  double flexible_mw = 2000.0;
  // Willingness to pay of the price-responsive tier (an assumption of this
  // model; see README).
  double flexible_bid = 1000.0;

  bool operator==(const DemandModel&) const = default;
};

struct InvestorProfile {
  double delta = 1.0;
  double psi = 0.2;
  double risk_free_rate = 0.071;

  bool operator==(const InvestorProfile&) const = default;
};

struct SystemConfig {
  std::vector<Technology> technologies;
  std::vector<Scenario> scenarios;
  TimeGrid time_grid;
  DemandModel demand;
  std::map<std::string, InvestorProfile> investors;
  std::string contract_technology;
  std::optional<Contract> contract;
  // Cap held fixed while calibrating a CapFloor floor.
  double capfloor_cap_rate = 0.14;
  // Provenance for synthetic configs; 0 when unknown.
  std::uint64_t seed = 0;

  const Technology& technology(std::string_view name) const;
  std::optional<std::size_t> technology_index(std::string_view name) const;
  const Technology& contracted() const { return technology(contract_technology); }
  InvestorProfile investor(std::string_view name) const;

  bool operator==(const SystemConfig&) const = default;
};

// Throws ValidationError naming the first violated invariant.
void validate(const SystemConfig& config);

}  // namespace ldes
