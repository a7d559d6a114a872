#include "ldes/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ldes {

CashflowDistribution CashflowDistribution::equiprobable(std::vector<double> values) {
  CashflowDistribution d;
  d.probabilities.assign(values.size(), values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size()));
  d.values = std::move(values);
  return d;
}

double CashflowDistribution::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probabilities[i] * values[i];
  return s;
}

void check_distribution(const CashflowDistribution& d) {
  if (d.values.empty()) throw std::invalid_argument("empty distribution");
  if (d.values.size() != d.probabilities.size()) throw std::invalid_argument("values and probabilities differ in length");
  double s = 0.0;
  for (double p : d.probabilities) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
}

double cvar(const CashflowDistribution& d, double psi) {
  check_distribution(d);
  if (!(psi > 0.0 && psi <= 1.0)) throw std::invalid_argument("psi must lie in (0, 1]");
  std::vector<std::size_t> order(d.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d.values[a] < d.values[b]; });
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t i : order) {
    const double take = std::min(d.probabilities[i], psi - mass);
    if (take <= 0.0) break;
    acc += take * d.values[i];
    mass += take;
  }
  // Probabilities summing to slightly less than psi (psi = 1) still average.
  return acc / mass;
}

double risk_adjusted_profit(const CashflowDistribution& d, const InvestorProfile& profile) {
  const double c = cvar(d, profile.psi);
  if (profile.delta == 1.0) return d.mean();
  if (profile.delta == 0.0) return c;
  return (1.0 - profile.delta) * c + profile.delta * d.mean();
}

double annuity_factor(double rate, int lifetime) {
  if (lifetime < 1) throw std::invalid_argument("lifetime must be >= 1");
  if (!(rate > -1.0)) throw std::invalid_argument("rate must be > -1");
  const double L = static_cast<double>(lifetime);
  if (std::abs(rate) < 1e-12) return 1.0 / L;
  // (1+r)^L - 1 via expm1/log1p keeps precision for small rates.
  const double g = std::expm1(L * std::log1p(rate));
  return rate * (g + 1.0) / g;
}

IrrResult scenario_irr(double annual_revenue, const Technology& tech, double risk_free) {
  const int L = tech.lifetime_years;
  const double capital = tech.invest_cost_annualized / annuity_factor(risk_free, L);
  const double net = annual_revenue - tech.fixed_om;
  if (!(capital > 0.0)) return {0.0, false};
  const double target = net / capital;
  // annuity_factor is increasing in the rate; bisection on the bracket.
  double lo = kIrrLower, hi = kIrrUpper;
  if (target <= annuity_factor(lo, L)) return {lo, false};
  if (target >= annuity_factor(hi, L)) return {hi, false};
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (annuity_factor(mid, L) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), true};
}

IrrResult implied_wacc(const CashflowDistribution& revenues, const Technology& tech, double risk_free) {
  check_distribution(revenues);
  return scenario_irr(revenues.mean(), tech, risk_free);
}

RevenueStats revenue_stats(const CashflowDistribution& revenues, const std::vector<double>& irrs, double psi) {
  check_distribution(revenues);
  if (irrs.size() != revenues.values.size()) throw std::invalid_argument("IRR count differs from revenue count");
  RevenueStats s;
  const double m = revenues.mean();
  double var = 0.0;
  for (std::size_t i = 0; i < revenues.values.size(); ++i) {
    const double dv = revenues.values[i] - m;
    var += revenues.probabilities[i] * dv * dv;
  }
  if (m == 0.0) {
    s.cv_defined = false;
    s.cv = 0.0;
  } else {
    s.cv = std::sqrt(var) / std::abs(m);
  }
  s.min_irr = *std::min_element(irrs.begin(), irrs.end());
  s.cvar_irr = cvar({irrs, revenues.probabilities}, psi);
  return s;
}

}  // namespace ldes
