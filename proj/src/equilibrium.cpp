#include "ldes/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "ldes/errors.hpp"

namespace ldes {

std::vector<double> grid_capacities(double cap_max, const GridSpec& grid) {
  if (grid.points < 2) throw ValidationError("grid.points", "need at least 2 grid points");
  std::vector<double> out(grid.points);
  for (int k = 0; k < grid.points; ++k) out[k] = cap_max * k / (grid.points - 1);
  out.back() = cap_max;
  return out;
}

double ldes_profit(Evaluator& ev, const Contract* contract, double capacity, const InvestorProfile& profile) {
  return risk_adjusted(ev.config(), *ev.evaluate(capacity), contract, profile);
}

double ldes_profit(const SystemConfig& config, const std::optional<Contract>& contract, double capacity,
                   const InvestorProfile& profile) {
  Evaluator ev(config);
  return ldes_profit(ev, contract ? &*contract : nullptr, capacity, profile);
}

CapacityEvaluation market_at(Evaluator& ev, double capacity) {
  InvestorProfile neutral;
  neutral.delta = 1.0;
  return ev.resolve_at(capacity, nullptr, neutral).evaluation;
}

namespace {

struct GridScan {
  std::vector<double> caps;
  std::vector<double> rho;
  std::vector<Crossing> crossings;
  bool plateau = false;
  bool lower_ok = false;
  bool upper_ok = false;
};

GridScan scan(Evaluator& ev, const Contract* contract, const InvestorProfile& profile, const GridSpec& grid) {
  GridScan g;
  g.caps = grid_capacities(ev.capacity_bound(), grid);
  ev.evaluate_all(g.caps);
  const double F = std::max(ev.contracted().fixed_cost(), 1.0);
  g.plateau = true;
  for (double c : g.caps) {
    g.rho.push_back(ldes_profit(ev, contract, c, profile));
    g.plateau = g.plateau && std::abs(g.rho.back()) <= grid.plateau_tolerance * F;
  }
  for (std::size_t k = 0; k + 1 < g.caps.size(); ++k) {
    if (g.rho[k] > 0.0 && g.rho[k + 1] <= 0.0) g.crossings.push_back({g.caps[k], g.caps[k + 1], true});
    if (g.rho[k] <= 0.0 && g.rho[k + 1] > 0.0) g.crossings.push_back({g.caps[k], g.caps[k + 1], false});
  }
  g.lower_ok = g.rho.front() <= 0.0;
  g.upper_ok = g.rho.back() >= 0.0;
  return g;
}

// Largest stable candidate on the grid: the upper bound, a crossing from
// above (returned as its bracket), or the lower bound.
struct Pick {
  enum Kind { Upper, Crossing, Lower, Plateau } kind;
  std::size_t crossing = 0;
};

Pick pick(const GridScan& g, const GridSpec& grid) {
  if (g.plateau && grid.target_mw) return {Pick::Plateau};
  if (g.upper_ok) return {Pick::Upper};
  for (std::size_t k = g.crossings.size(); k-- > 0;) {
    if (g.crossings[k].stable) return {Pick::Crossing, k};
  }
  if (g.lower_ok) return {Pick::Lower};
  throw NumericalError("no equilibrium candidate on the capacity grid");
}

int stable_candidates(const GridScan& g) {
  int n = g.upper_ok ? 1 : 0;
  for (const auto& c : g.crossings) n += c.stable ? 1 : 0;
  // The lower bound is an equilibrium only when rho starts non-positive.
  return n + (g.lower_ok ? 1 : 0);
}

}  // namespace

double grid_equilibrium(Evaluator& ev, const Contract* contract, const InvestorProfile& profile, const GridSpec& grid) {
  const GridScan g = scan(ev, contract, profile, grid);
  const Pick p = pick(g, grid);
  switch (p.kind) {
    case Pick::Plateau: return *grid.target_mw;
    case Pick::Upper: return g.caps.back();
    case Pick::Lower: return 0.0;
    case Pick::Crossing: {
      // Linear interpolation of rho between the bracketing grid points.
      const Crossing& c = g.crossings[p.crossing];
      const auto k = static_cast<std::size_t>(std::find(g.caps.begin(), g.caps.end(), c.lower) - g.caps.begin());
      const double r0 = g.rho[k], r1 = g.rho[k + 1];
      return c.lower + (c.upper - c.lower) * r0 / (r0 - r1);
    }
  }
  return 0.0;
}

EquilibriumResult find_equilibrium(Evaluator& ev, const std::optional<Contract>& contract,
                                   const InvestorProfile& profile, const GridSpec& grid) {
  const Contract* k = contract ? &*contract : nullptr;
  const SystemConfig& config = ev.config();
  const Technology& tech = ev.contracted();
  const GridScan g = scan(ev, k, profile, grid);

  EquilibriumResult res;
  res.technology = tech.name;
  res.contract = contract;
  res.profile = profile;
  res.crossings = g.crossings;
  for (std::size_t i = 0; i < g.caps.size(); ++i) res.grid_trace.emplace_back(g.caps[i], g.rho[i]);
  res.multiple_equilibria = stable_candidates(g) > 1 && !g.plateau;

  CapacityEvaluation point;
  const Pick p = pick(g, grid);
  if (p.kind == Pick::Plateau) {
    res.selection = "plateau";
    point = market_at(ev, std::clamp(*grid.target_mw, 0.0, ev.capacity_bound()));
    res.rho = risk_adjusted(config, point, k, profile);
  } else if (p.kind == Pick::Upper) {
    res.selection = "upper-bound";
    point = *ev.evaluate(g.caps.back());
    res.rho = g.rho.back();
  } else if (p.kind == Pick::Lower) {
    res.selection = "lower-bound";
    point = *ev.evaluate(0.0);
    res.rho = g.rho.front();
  } else {
    res.selection = "crossing";
    double lo = g.crossings[p.crossing].lower;
    double hi = g.crossings[p.crossing].upper;
    while (hi - lo > grid.tolerance_mw) {
      const double mid = 0.5 * (lo + hi);
      const double r = ldes_profit(ev, k, mid, profile);
      res.refinement_trace.emplace_back(mid, r);
      if (r > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    Evaluator::Resolution z = ev.resolve_crossing(lo, hi, k, profile);
    point = std::move(z.evaluation);
    res.rho = z.rho;
  }

  res.capacity = point.capacity;
  res.capacities = point.outcome.capacities;
  res.capacities[tech.name] = point.capacity;
  res.per_scenario = point.outcome.scenarios;
  res.exposures = point.exposures;
  res.expected_welfare = point.outcome.expected_welfare;

  const double F = std::max(tech.fixed_cost(), 1.0);
  res.profits[tech.name] = res.rho;
  const double c = res.capacity;
  const double cmax = ev.capacity_bound();
  // Positive profit must sit at the upper bound and negative profit at
  // zero; capacities are taken relative to the bound.
  const double span = std::max(cmax, 1e-12);
  res.residuals[tech.name] = std::max(std::min((cmax - c) / span, std::max(res.rho, 0.0) / F),
                                      std::min(c / span, std::max(-res.rho, 0.0) / F));
  if (res.selection == "plateau") res.residuals[tech.name] = std::abs(res.rho) / F;
  const Capacities pinned{{tech.name, c}};
  for (const auto& [name, r] : zero_profit_residuals(config, point.outcome, pinned)) {
    res.residuals[name] = r;
    const Technology& t = config.technology(name);
    res.profits[name] = point.outcome.expected_revenue.at(name) - t.fixed_cost();
  }
  return res;
}

EquilibriumResult find_equilibrium(const SystemConfig& config, const std::optional<Contract>& contract,
                                   const InvestorProfile& profile, const GridSpec& grid) {
  Evaluator ev(config);
  return find_equilibrium(ev, contract, profile, grid);
}

std::vector<EquilibriumResult> sweep_risk_aversion(Evaluator& ev, const std::optional<Contract>& contract,
                                                   const InvestorProfile& base, const std::vector<double>& deltas,
                                                   const GridSpec& grid) {
  std::vector<EquilibriumResult> out;
  for (double d : deltas) {
    if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("delta", "must lie in [0, 1]");
    InvestorProfile p = base;
    p.delta = d;
    out.push_back(find_equilibrium(ev, contract, p, grid));
  }
  return out;
}

}  // namespace ldes
