#pragma once

// Risk and finance metrics over discrete scenario distributions.

#include <span>
#include <vector>

#include "ldes/model.hpp"

namespace ldes {

struct CashflowDistribution {
  std::vector<double> values;
  std::vector<double> probabilities;

  static CashflowDistribution equiprobable(std::vector<double> values);
  double mean() const;
};

// Throws std::invalid_argument when empty, lengths differ, or probabilities
// do not sum to 1 within 1e-9.
void check_distribution(const CashflowDistribution& d);

// Expected value of the worst `psi` probability mass; the boundary scenario
// contributes fractionally.
double cvar(const CashflowDistribution& d, double psi);

// (1 - delta) * cvar(psi) + delta * mean.
double risk_adjusted_profit(const CashflowDistribution& d, const InvestorProfile& profile);

// Capital recovery factor rate (1+rate)^L / ((1+rate)^L - 1); 1/L at rate 0.
double annuity_factor(double rate, int lifetime);

struct IrrResult {
  double rate = 0.0;
  // False when no rate in the search bracket reproduces the revenue; rate is
  // then the violated bracket end.
  bool finite = true;
};

inline constexpr double kIrrLower = -0.99;
inline constexpr double kIrrUpper = 10.0;

// Rate w with annual_revenue = K * annuity_factor(w, L), where K is the
// capital whose annuity at the risk-free rate equals the annualized
// investment cost. annual_revenue is net of variable costs; fixed O&M is
// deducted here.
IrrResult scenario_irr(double annual_revenue, const Technology& tech, double risk_free);

// scenario_irr of the probability-weighted mean revenue.
IrrResult implied_wacc(const CashflowDistribution& revenues, const Technology& tech, double risk_free);

struct RevenueStats {
  double cv = 0.0;         // std / mean of revenues
  bool cv_defined = true;  // false when the mean is zero
  double min_irr = 0.0;
  double cvar_irr = 0.0;
};

// CV of `revenues`; minimum and CVaR_psi of the matching scenario IRRs.
RevenueStats revenue_stats(const CashflowDistribution& revenues, const std::vector<double>& irrs, double psi = 0.2);

}  // namespace ldes
