#pragma once

// Contract payoffs and mechanism cost metrics.

#include <optional>

#include "ldes/contract.hpp"
#include "ldes/dispatch.hpp"
#include "ldes/model.hpp"
#include "ldes/risk.hpp"

namespace ldes {

// What a contract settles against, per MW of contracted capacity.
struct ScenarioExposure {
  double net_revenue = 0.0;  // pi, $/MW-yr
  double sigma = 0.0;        // $/MWh
  double v = 0.0;            // MWh/MW-yr
  double tau = 0.0;          // share of hours
};

// Exposure of `tech` in one dispatch result; zeros when the tech has no
// capacity in it.
ScenarioExposure exposure_of(const DispatchResult& r, const Technology& tech);

// Revenue level ($/MW-yr) that a CapFloor rate stands for.
double capfloor_level(double rate, StrikeUnit unit, const Technology& tech, double risk_free);

// Contract payoff kappa ($/MW-yr); positive is an inflow to the investor.
double payoff(const Contract& contract, const ScenarioExposure& e, const Technology& tech, double risk_free);

// pi + kappa. For a revenue CfD this is the strike itself.
double settled_revenue(const Contract* contract, const ScenarioExposure& e, const Technology& tech,
                       double risk_free);

struct MechanismCost {
  double per_mw_installed = 0.0;  // E[kappa] / F
  // E[kappa] * c / ((c - baseline) * F); empty when c <= baseline.
  std::optional<double> per_mw_incentivized;
};

MechanismCost expected_mechanism_cost(const CashflowDistribution& payoffs, double capacity,
                                      double baseline_capacity, const Technology& tech);

}  // namespace ldes
