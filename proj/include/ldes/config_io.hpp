#pragma once

// Configuration files.
//
// A config is a sectioned key = value text file plus a CSV table of
// per-scenario profiles:
//
//   [system]      contract_technology, capfloor_cap_rate, seed, profiles,
//                 step_hours, weights ("uniform N" or a comma list)
//   [demand]      price_cap, flexible_mw, flexible_bid
//   [technology NAME]  kind, invest_cost_annualized, fixed_om, var_cost,
//                 fuel_indexed, heat_rate, cap_max, cap_fixed,
//                 storage_duration, round_trip_efficiency,
//                 initial_soc_fraction, lifetime_years
//   [investor NAME]    delta, psi, risk_free_rate
//   [scenario ID] probability, gas_price
//   [contract]    type (cf|rcfd|scfd|avc) and its parameters
//
// Profiles CSV header: scenario_id,step,demand_mw,cf_<tech>...
// Lines starting with '#' or ';' are comments.

#include <string>
#include <string_view>

#include "ldes/model.hpp"

namespace ldes {

// Parses and validates. Throws ParseError or ValidationError.
SystemConfig load_config(const std::string& path);

// Parses without validating; `profiles_csv` is the profile table text.
SystemConfig parse_config(std::string_view text, std::string_view profiles_csv);

// Writes the config and its profile table (named by `profiles_name`, or
// "<stem>_profiles.csv" next to `path` when empty).
void save_config(const SystemConfig& config, const std::string& path,
                 const std::string& profiles_name = {});

std::string format_config(const SystemConfig& config, const std::string& profiles_name);
std::string format_profiles(const SystemConfig& config);

// Stable 64-bit FNV-1a hash of the serialized config, as 16 hex digits.
std::string config_hash(const SystemConfig& config);

}  // namespace ldes
