#include "ldes/contract.hpp"

#include <sstream>

namespace ldes {

ContractFamily family_of(const Contract& c) {
  return static_cast<ContractFamily>(c.index());
}

std::string_view family_name(ContractFamily f) {
  switch (f) {
    case ContractFamily::CapFloor: return "cf";
    case ContractFamily::RevenueCfD: return "rcfd";
    case ContractFamily::SpreadCfD: return "scfd";
    case ContractFamily::Availability: return "avc";
  }
  return "unknown";
}

std::string_view family_label(ContractFamily f) {
  switch (f) {
    case ContractFamily::CapFloor: return "C&F";
    case ContractFamily::RevenueCfD: return "R-CfD";
    case ContractFamily::SpreadCfD: return "S-CfD";
    case ContractFamily::Availability: return "AvC";
  }
  return "unknown";
}

std::optional<ContractFamily> parse_family(std::string_view s) {
  if (s == "cf" || s == "capfloor" || s == "C&F") return ContractFamily::CapFloor;
  if (s == "rcfd" || s == "R-CfD") return ContractFamily::RevenueCfD;
  if (s == "scfd" || s == "S-CfD") return ContractFamily::SpreadCfD;
  if (s == "avc" || s == "AvC") return ContractFamily::Availability;
  return std::nullopt;
}

std::string_view unit_name(StrikeUnit u) {
  return u == StrikeUnit::CostOfCapital ? "cost-of-capital" : "fixed-cost-share";
}

std::optional<StrikeUnit> parse_unit(std::string_view s) {
  if (s == "cost-of-capital") return StrikeUnit::CostOfCapital;
  if (s == "fixed-cost-share") return StrikeUnit::FixedCostShare;
  return std::nullopt;
}

std::string describe(const Contract& c) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CapFloor>) {
          os << "C&F floor=" << k.floor_rate << " cap=" << k.cap_rate << " (" << unit_name(k.unit) << ")";
        } else if constexpr (std::is_same_v<T, RevenueCfD>) {
          os << "R-CfD strike=" << k.strike_rate << " of F";
        } else if constexpr (std::is_same_v<T, SpreadCfD>) {
          os << "S-CfD spread=" << k.strike_spread << " $/MWh";
        } else {
          os << "AvC rate=" << k.payment_rate << " of F";
        }
      },
      c);
  return os.str();
}

double free_parameter(const Contract& c) {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CapFloor>) return k.floor_rate;
        else if constexpr (std::is_same_v<T, RevenueCfD>) return k.strike_rate;
        else if constexpr (std::is_same_v<T, SpreadCfD>) return k.strike_spread;
        else return k.payment_rate;
      },
      c);
}

Contract with_free_parameter(const Contract& c, double value) {
  Contract out = c;
  std::visit(
      [value](auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CapFloor>) k.floor_rate = value;
        else if constexpr (std::is_same_v<T, RevenueCfD>) k.strike_rate = value;
        else if constexpr (std::is_same_v<T, SpreadCfD>) k.strike_spread = value;
        else k.payment_rate = value;
      },
      out);
  return out;
}

}  // namespace ldes
