#include "ldes/calibration.hpp"

#include <cmath>
#include <sstream>

#include "ldes/errors.hpp"
#include "ldes/text.hpp"

namespace ldes {

ParameterBounds default_bounds(ContractFamily family, const SystemConfig& config) {
  switch (family) {
    case ContractFamily::CapFloor: return {0.0, config.capfloor_cap_rate};
    case ContractFamily::SpreadCfD: return {0.0, config.demand.price_cap};
    case ContractFamily::RevenueCfD:
    case ContractFamily::Availability: return {0.0, 2.0};
  }
  return {0.0, 1.0};
}

Contract make_contract(ContractFamily family, double value, const SystemConfig& config) {
  switch (family) {
    case ContractFamily::CapFloor: return CapFloor{value, config.capfloor_cap_rate};
    case ContractFamily::RevenueCfD: return RevenueCfD{value};
    case ContractFamily::SpreadCfD: return SpreadCfD{value};
    case ContractFamily::Availability: return Availability{value};
  }
  throw ValidationError("mechanism", "unknown contract family");
}

namespace {

std::string format_curve(const std::vector<std::pair<double, double>>& curve) {
  std::ostringstream os;
  for (const auto& [p, c] : curve) os << "\n  " << text::num(p) << " -> " << text::num(c) << " MW";
  return os.str();
}

}  // namespace

CalibrationResult calibrate(Evaluator& ev, ContractFamily family, double target, const InvestorProfile& profile,
                            const GridSpec& grid, const CalibrationOptions& options) {
  const SystemConfig& config = ev.config();
  const ParameterBounds b = options.bounds.value_or(default_bounds(family, config));
  if (!(b.lower <= b.upper)) throw ValidationError("bounds", "lower bound exceeds upper bound");
  if (!(target >= 0.0 && target <= ev.capacity_bound())) {
    throw ValidationError("target", "target capacity outside [0, cap_max]");
  }
  if (options.curve_points < 2) throw ValidationError("curve_points", "need at least 2 points");

  GridSpec g = grid;
  g.target_mw = target;
  const double step = ev.capacity_bound() / (grid.points - 1);

  CalibrationResult res;
  res.target_mw = target;
  res.grid_step_mw = step;

  // Diagnostic curve of the grid-level equilibrium; evaluations are shared.
  for (int i = 0; i < options.curve_points; ++i) {
    const double p =
        i + 1 == options.curve_points ? b.upper : b.lower + (b.upper - b.lower) * i / (options.curve_points - 1);
    const Contract k = make_contract(family, p, config);
    res.curve.emplace_back(p, grid_equilibrium(ev, &k, profile, g));
  }
  for (std::size_t i = 1; i < res.curve.size(); ++i) {
    if (res.curve[i].second < res.curve[i - 1].second - 1e-6 * step) {
      throw CalibrationError("equilibrium capacity is not monotone in the " + std::string(family_label(family)) +
                                 " parameter:" + format_curve(res.curve),
                             res.curve);
    }
  }
  if (res.curve.front().second > target + step || res.curve.back().second < target - step) {
    throw CalibrationError("parameter bounds [" + text::num(b.lower) + ", " + text::num(b.upper) + "] do not bracket " +
                               text::num(target) + " MW:" + format_curve(res.curve),
                           res.curve);
  }

  const CapacityEvaluation at_target = market_at(ev, target);
  auto rho = [&](double p) {
    const Contract k = make_contract(family, p, config);
    return risk_adjusted(config, at_target, &k, profile);
  };
  double lo = b.lower, hi = b.upper;
  double r_lo = rho(lo), r_hi = rho(hi);
  double p = 0.0;
  if (r_lo >= 0.0) {
    p = lo;
  } else if (r_hi <= 0.0) {
    p = hi;
  } else {
    const double tol = options.parameter_tolerance * std::max(b.upper - b.lower, 1e-300);
    while (hi - lo > tol && res.iterations < options.max_iterations) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ++res.iterations;
      const double r = rho(mid);
      if (r == 0.0) {
        lo = hi = mid;
        break;
      }
      if (r < 0.0) {
        lo = mid;
        r_lo = r;
      } else {
        hi = mid;
        r_hi = r;
      }
    }
    // The end closer to zero profit.
    p = std::abs(r_lo) < std::abs(r_hi) ? lo : hi;
  }

  res.parameter = p;
  res.contract = make_contract(family, p, config);
  res.rho_at_target = rho(p);
  res.equilibrium = find_equilibrium(ev, res.contract, profile, g);
  res.residual_mw = res.equilibrium.capacity - target;
  if (std::abs(res.residual_mw) <= step) return res;

  // The target sits on a basis change whose profit jump the root above does
  // not carry into the refined equilibrium. Bisect on the equilibrium
  // capacity itself, keeping eq(a) <= target < eq(z).
  auto solve = [&](double q) { return find_equilibrium(ev, make_contract(family, q, config), profile, g); };
  double a = b.lower, z = b.upper;
  EquilibriumResult ea = solve(a), ez = solve(z);
  if (ea.capacity <= target && ez.capacity > target) {
    const double tol = 1e-6 * (b.upper - b.lower);
    while (z - a > tol && res.iterations < options.max_iterations) {
      const double mid = 0.5 * (a + z);
      ++res.iterations;
      EquilibriumResult em = solve(mid);
      if (em.capacity <= target) {
        a = mid;
        ea = std::move(em);
      } else {
        z = mid;
        ez = std::move(em);
      }
    }
  }
  const bool left = std::abs(ea.capacity - target) <= std::abs(ez.capacity - target);
  const double best = left ? a : z;
  EquilibriumResult& eq = left ? ea : ez;
  if (std::abs(eq.capacity - target) > step) {
    throw CalibrationError("no " + std::string(family_label(family)) + " parameter places the equilibrium within " +
                               text::num(step) + " MW of " + text::num(target) + " MW:" + format_curve(res.curve),
                           res.curve);
  }
  res.parameter = best;
  res.contract = make_contract(family, best, config);
  res.rho_at_target = eq.rho;
  res.equilibrium = std::move(eq);
  res.residual_mw = res.equilibrium.capacity - target;
  return res;
}

}  // namespace ldes
