#include "ldes/contracts.hpp"

#include <algorithm>

namespace ldes {

ScenarioExposure exposure_of(const DispatchResult& r, const Technology& tech) {
  ScenarioExposure e;
  if (auto it = r.net_revenue_per_mw.find(tech.name); it != r.net_revenue_per_mw.end()) e.net_revenue = it->second;
  if (auto it = r.storage_stats.find(tech.name); it != r.storage_stats.end()) {
    e.sigma = it->second.sigma;
    e.v = it->second.v;
    e.tau = it->second.tau;
  }
  return e;
}

double capfloor_level(double rate, StrikeUnit unit, const Technology& tech, double risk_free) {
  if (unit == StrikeUnit::FixedCostShare) return rate * tech.fixed_cost();
  const double capital = tech.invest_cost_annualized / annuity_factor(risk_free, tech.lifetime_years);
  return capital * annuity_factor(rate, tech.lifetime_years) + tech.fixed_om;
}

double payoff(const Contract& contract, const ScenarioExposure& e, const Technology& tech, double risk_free) {
  const double F = tech.fixed_cost();
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CapFloor>) {
          const double floor = capfloor_level(k.floor_rate, k.unit, tech, risk_free);
          const double cap = capfloor_level(k.cap_rate, k.unit, tech, risk_free);
          return std::max(floor - e.net_revenue, 0.0) - std::max(e.net_revenue - cap, 0.0);
        } else if constexpr (std::is_same_v<T, RevenueCfD>) {
          return k.strike_rate * F - e.net_revenue;
        } else if constexpr (std::is_same_v<T, SpreadCfD>) {
          return (k.strike_spread - e.sigma) * e.v;
        } else {
          return e.tau * (k.payment_rate * F);
        }
      },
      contract);
}

double settled_revenue(const Contract* contract, const ScenarioExposure& e, const Technology& tech,
                       double risk_free) {
  if (contract == nullptr) return e.net_revenue;
  if (const auto* r = std::get_if<RevenueCfD>(contract)) return r->strike_rate * tech.fixed_cost();
  return e.net_revenue + payoff(*contract, e, tech, risk_free);
}

MechanismCost expected_mechanism_cost(const CashflowDistribution& payoffs, double capacity, double baseline_capacity,
                                      const Technology& tech) {
  check_distribution(payoffs);
  const double F = tech.fixed_cost();
  MechanismCost c;
  const double ek = payoffs.mean();
  c.per_mw_installed = ek / F;
  if (capacity > baseline_capacity) c.per_mw_incentivized = ek * capacity / ((capacity - baseline_capacity) * F);
  return c;
}

}  // namespace ldes
