#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ldes {

// How CapFloor strike rates are turned into revenue levels.
//   FixedCostShare: level = rate * F (F = annualized fixed cost)
//   CostOfCapital:  level = K * crf(rate, L), K the capital recovered by F at
//                   the risk-free rate, i.e. the revenue earning IRR = rate.
enum class StrikeUnit { FixedCostShare, CostOfCapital };

struct CapFloor {
  double floor_rate = 0.0;
  double cap_rate = 0.0;
  StrikeUnit unit = StrikeUnit::CostOfCapital;
  bool operator==(const CapFloor&) const = default;
};

// strike_rate is a share of F.
struct RevenueCfD {
  double strike_rate = 1.0;
  bool operator==(const RevenueCfD&) const = default;
};

// strike_spread in $/MWh.
struct SpreadCfD {
  double strike_spread = 0.0;
  bool operator==(const SpreadCfD&) const = default;
};

// payment_rate is a share of F paid per unit of availability.
struct Availability {
  double payment_rate = 0.0;
  bool operator==(const Availability&) const = default;
};

using Contract = std::variant<CapFloor, RevenueCfD, SpreadCfD, Availability>;

enum class ContractFamily { CapFloor, RevenueCfD, SpreadCfD, Availability };

ContractFamily family_of(const Contract& c);
std::string_view family_name(ContractFamily f);          // "cf", "rcfd", "scfd", "avc"
std::string_view family_label(ContractFamily f);         // "C&F", "R-CfD", ...
std::optional<ContractFamily> parse_family(std::string_view s);
std::string_view unit_name(StrikeUnit u);
std::optional<StrikeUnit> parse_unit(std::string_view s);
std::string describe(const Contract& c);

// Value of the single parameter calibration adjusts.
double free_parameter(const Contract& c);
Contract with_free_parameter(const Contract& c, double value);

}  // namespace ldes
