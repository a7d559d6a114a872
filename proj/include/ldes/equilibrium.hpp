#pragma once

// Capacity equilibrium of the contracted, possibly risk-averse investor:
// free entry drives its risk-adjusted profit rho to zero unless a capacity
// bound binds (0 <= c <= cap_max complementary to rho >= 0), while all
// other investable technologies follow the risk-neutral expansion.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldes/contract.hpp"
#include "ldes/expansion.hpp"
#include "ldes/model.hpp"

namespace ldes {

struct GridSpec {
  int points = 21;             // over [0, cap_max], endpoints included
  double tolerance_mw = 10.0;  // bisection width between grid points
  // Chosen when rho is zero (within plateau_tolerance * F) on the whole grid.
  std::optional<double> target_mw;
  double plateau_tolerance = 1e-3;
};

std::vector<double> grid_capacities(double cap_max, const GridSpec& grid);

struct Crossing {
  double lower = 0.0;  // grid capacities bracketing the sign change
  double upper = 0.0;
  bool stable = true;  // rho decreasing through zero
};

struct EquilibriumResult {
  std::string technology;
  double capacity = 0.0;
  double rho = 0.0;
  Capacities capacities;
  // rho for the contracted technology; E[pi] - F for the others.
  std::map<std::string, double> profits;
  // Complementarity residuals: profit in units of F, capacity relative to
  // its bound.
  std::map<std::string, double> residuals;
  std::optional<Contract> contract;
  InvestorProfile profile;
  std::vector<DispatchResult> per_scenario;
  std::vector<ScenarioExposure> exposures;
  std::vector<std::pair<double, double>> grid_trace;
  std::vector<std::pair<double, double>> refinement_trace;
  std::vector<Crossing> crossings;
  // "crossing", "lower-bound", "upper-bound", "plateau"
  std::string selection;
  bool multiple_equilibria = false;
  double expected_welfare = 0.0;
};

// Risk-adjusted profit per MW of the contracted technology at `capacity`.
double ldes_profit(Evaluator& evaluator, const Contract* contract, double capacity, const InvestorProfile& profile);
double ldes_profit(const SystemConfig& config, const std::optional<Contract>& contract, double capacity,
                   const InvestorProfile& profile);

// Grid search, bisection to the capacity tolerance, then an exact zero of
// rho inside the final bracket. Among several sign changes the largest
// stable one is selected and the result is flagged.
EquilibriumResult find_equilibrium(Evaluator& evaluator, const std::optional<Contract>& contract,
                                   const InvestorProfile& profile, const GridSpec& grid = {});
EquilibriumResult find_equilibrium(const SystemConfig& config, const std::optional<Contract>& contract,
                                   const InvestorProfile& profile, const GridSpec& grid = {});

// Market outcome at a capacity chosen for reasons other than the contracted
// investor's profit (a plateau target, a calibration target): among the
// optimal solutions there, the one nearest zero expected uncontracted profit.
CapacityEvaluation market_at(Evaluator& evaluator, double capacity);

// Capacity of the grid-level equilibrium (no refinement), from cached
// evaluations only. Used by calibration.
double grid_equilibrium(Evaluator& evaluator, const Contract* contract, const InvestorProfile& profile,
                        const GridSpec& grid);

std::vector<EquilibriumResult> sweep_risk_aversion(Evaluator& evaluator, const std::optional<Contract>& contract,
                                                   const InvestorProfile& base, const std::vector<double>& deltas,
                                                   const GridSpec& grid = {});

}  // namespace ldes
