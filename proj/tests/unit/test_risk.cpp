#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ldes/risk.hpp"

using namespace ldes;
using doctest::Approx;

namespace {

const CashflowDistribution kFive = CashflowDistribution::equiprobable({10, 20, 30, 40, 50});

// sup over zeta of zeta - (1/psi) E[(zeta - u)+]; the sup is attained at a
// scenario value, so checking each one is exact.
double cvar_by_optimization(const CashflowDistribution& d, double psi) {
  double best = -INFINITY;
  for (double zeta : d.values) {
    double shortfall = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      shortfall += d.probabilities[i] * std::max(0.0, zeta - d.values[i]);
    }
    best = std::max(best, zeta - shortfall / psi);
  }
  return best;
}

CashflowDistribution random_distribution(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 30);
  std::normal_distribution<double> value(0.0, 100.0);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  CashflowDistribution d;
  const int n = size(rng);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    d.values.push_back(value(rng));
    d.probabilities.push_back(weight(rng));
    sum += d.probabilities.back();
  }
  for (double& p : d.probabilities) p /= sum;
  // Renormalize so the sum is 1 to the last bit the checks care about.
  const double s = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
  d.probabilities.back() += 1.0 - s;
  return d;
}

Technology asset(double annualized, int lifetime, double fixed_om = 0.0) {
  Technology t;
  t.name = "asset";
  t.kind = TechKind::Storage;
  t.invest_cost_annualized = annualized;
  t.fixed_om = fixed_om;
  t.lifetime_years = lifetime;
  return t;
}

// Sign of NPV of a level revenue against capital K at rate w, bisected.
double npv_irr(double revenue, double capital, int lifetime) {
  auto npv = [&](double w) {
    double pv = 0.0;
    for (int y = 1; y <= lifetime; ++y) pv += revenue / std::pow(1.0 + w, y);
    return pv - capital;
  };
  double lo = -0.5, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (npv(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cvar: worked examples") {
  CHECK(cvar(kFive, 0.2) == Approx(10.0));
  CHECK(cvar(kFive, 1.0) == Approx(30.0));
  CHECK(cvar(kFive, 0.3) == Approx((10.0 * 0.2 + 20.0 * 0.1) / 0.3));
  CHECK(cvar(kFive, 0.3) == Approx(13.333333333333));
}

TEST_CASE("cvar: input checks") {
  CHECK_THROWS(cvar(CashflowDistribution{}, 0.2));
  CHECK_THROWS(cvar(kFive, 0.0));
  CHECK_THROWS(cvar({{1.0, 2.0}, {0.5, 0.4}}, 0.2));
  CHECK_THROWS(cvar({{1.0, 2.0}, {1.0}}, 0.2));
}

TEST_CASE("cvar: sorting matches the optimization form on 1000 random distributions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> psi(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const CashflowDistribution d = random_distribution(rng);
    const double p = psi(rng);
    const double a = cvar(d, p), b = cvar_by_optimization(d, p);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("cvar: coherence properties") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    const CashflowDistribution d = random_distribution(rng);
    const double mean = d.mean();
    CHECK(cvar(d, 1.0) == Approx(mean).epsilon(1e-12).scale(100.0));
    double prev = -INFINITY;
    for (double psi : {0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 1.0}) {
      const double c = cvar(d, psi);
      CHECK(c <= mean + 1e-9);
      CHECK(c >= prev - 1e-9);
      prev = c;
    }
    CashflowDistribution shifted = d, scaled = d;
    for (double& v : shifted.values) v += 37.5;
    for (double& v : scaled.values) v *= 3.0;
    CHECK(cvar(shifted, 0.2) == Approx(cvar(d, 0.2) + 37.5).epsilon(1e-12).scale(100.0));
    CHECK(cvar(scaled, 0.2) == Approx(3.0 * cvar(d, 0.2)).epsilon(1e-12).scale(100.0));
  }
}

TEST_CASE("risk-adjusted profit") {
  CHECK(risk_adjusted_profit(kFive, {1.0, 0.2, 0.071}) == Approx(30.0));
  CHECK(risk_adjusted_profit(kFive, {1.0, 0.9, 0.071}) == Approx(30.0));
  CHECK(risk_adjusted_profit(kFive, {0.0, 0.2, 0.071}) == Approx(10.0));
  CHECK(risk_adjusted_profit(kFive, {0.6, 0.2, 0.071}) == Approx(22.0));

  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const CashflowDistribution d = random_distribution(rng);
    double prev = -INFINITY;
    for (double delta = 0.0; delta <= 1.0 + 1e-12; delta += 0.1) {
      const double v = risk_adjusted_profit(d, {delta, 0.2, 0.071});
      CHECK(v >= prev - 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("annuity factor") {
  CHECK(annuity_factor(0.0, 40) == Approx(0.025));
  for (double r : {-0.5, 0.0, 0.03, 0.071, 0.5}) CHECK(annuity_factor(r, 1) == Approx(1.0 + r));

  // Present value of 40 unit payments at 7.1%, inverted.
  double pv = 0.0;
  for (int y = 1; y <= 40; ++y) pv += 1.0 / std::pow(1.071, y);
  CHECK(annuity_factor(0.071, 40) == Approx(1.0 / pv).epsilon(1e-12));

  // Continuity at zero and strict increase above it.
  CHECK(annuity_factor(1e-9, 40) == Approx(0.025).epsilon(1e-7));
  double prev = annuity_factor(0.0, 40);
  for (double r = 0.01; r < 1.0; r += 0.01) {
    const double a = annuity_factor(r, 40);
    CHECK(a > prev);
    prev = a;
  }
  CHECK_THROWS(annuity_factor(0.05, 0));
  CHECK_THROWS(annuity_factor(-1.0, 10));
}

TEST_CASE("scenario IRR") {
  const Technology t = asset(100000.0, 40);
  SUBCASE("revenue equal to the annualized cost returns the risk-free rate") {
    const IrrResult r = scenario_irr(100000.0, t, 0.071);
    CHECK(r.finite);
    CHECK(r.rate == Approx(0.071).epsilon(1e-9));
  }
  SUBCASE("1.5x revenue against an NPV bisection") {
    const double capital = 100000.0 / annuity_factor(0.071, 40);
    const IrrResult r = scenario_irr(150000.0, t, 0.071);
    CHECK(r.finite);
    CHECK(r.rate == Approx(npv_irr(150000.0, capital, 40)).epsilon(1e-8));
    CHECK(r.rate > 0.071);
  }
  SUBCASE("negative rates are reachable") {
    const double capital = 100000.0 / annuity_factor(0.071, 40);
    const IrrResult r = scenario_irr(15000.0, t, 0.071);
    CHECK(r.finite);
    CHECK(r.rate < 0.0);
    CHECK(r.rate == Approx(npv_irr(15000.0, capital, 40)).epsilon(1e-8));
  }
  SUBCASE("zero or negative revenue is flagged") {
    CHECK_FALSE(scenario_irr(0.0, t, 0.071).finite);
    CHECK_FALSE(scenario_irr(-5000.0, t, 0.071).finite);
    CHECK(scenario_irr(0.0, t, 0.071).rate == kIrrLower);
  }
  SUBCASE("fixed O&M comes off the revenue") {
    const Technology om = asset(100000.0, 40, 20000.0);
    CHECK(scenario_irr(120000.0, om, 0.071).rate == Approx(0.071).epsilon(1e-9));
  }
  SUBCASE("strictly increasing in revenue") {
    double prev = -INFINITY;
    for (double rev = 10000.0; rev <= 400000.0; rev += 10000.0) {
      const double r = scenario_irr(rev, t, 0.071).rate;
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("implied WACC") {
  const Technology t = asset(80000.0, 40);
  CHECK(implied_wacc(CashflowDistribution::equiprobable({60000.0, 100000.0}), t, 0.071).rate ==
        Approx(0.071).epsilon(1e-9));
  const auto flat = CashflowDistribution::equiprobable({95000.0, 95000.0, 95000.0});
  CHECK(implied_wacc(flat, t, 0.071).rate == scenario_irr(95000.0, t, 0.071).rate);
  CHECK(implied_wacc(CashflowDistribution::equiprobable({50000.0, 70000.0}), t, 0.071).rate < 0.071);
}

TEST_CASE("revenue statistics") {
  SUBCASE("constant revenues") {
    const Technology t = asset(80000.0, 40);
    const auto d = CashflowDistribution::equiprobable({80000.0, 80000.0, 80000.0});
    std::vector<double> irrs;
    for (double v : d.values) irrs.push_back(scenario_irr(v, t, 0.071).rate);
    const RevenueStats s = revenue_stats(d, irrs);
    CHECK(s.cv == 0.0);
    CHECK(s.min_irr == Approx(0.071).epsilon(1e-9));
    CHECK(s.cvar_irr == Approx(0.071).epsilon(1e-9));
  }
  SUBCASE("two equiprobable revenues") {
    const auto d = CashflowDistribution::equiprobable({50.0, 150.0});
    CHECK(revenue_stats(d, {0.01, 0.02}).cv == Approx(0.5));
  }
  SUBCASE("CVaR of the IRRs") {
    const RevenueStats s = revenue_stats(kFive, {10, 20, 30, 40, 50});
    CHECK(s.cvar_irr == Approx(10.0));
    CHECK(s.min_irr == 10.0);
  }
  SUBCASE("zero mean leaves CV undefined") {
    const RevenueStats s = revenue_stats(CashflowDistribution::equiprobable({-1.0, 1.0}), {0.0, 0.1});
    CHECK_FALSE(s.cv_defined);
  }
}
