#pragma once

// Contract calibration: the value of a contract's free parameter at which
// the equilibrium capacity of the contracted technology hits a target.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldes/contract.hpp"
#include "ldes/equilibrium.hpp"
#include "ldes/errors.hpp"

namespace ldes {

struct ParameterBounds {
  double lower = 0.0;
  double upper = 1.0;
};

// Default search range of the free parameter: [0, cap] for the C&F floor,
// [0, 2] for shares of F, [0, price cap] for the S-CfD spread.
ParameterBounds default_bounds(ContractFamily family, const SystemConfig& config);

// Contract of `family` with its free parameter at `value`. C&F holds the
// cap at config.capfloor_cap_rate.
Contract make_contract(ContractFamily family, double value, const SystemConfig& config);

// Raised when the bounds do not bracket the target, or when the equilibrium
// capacity is not monotone in the parameter. Carries the diagnostic curve.
class CalibrationError : public NumericalError {
 public:
  CalibrationError(const std::string& msg, std::vector<std::pair<double, double>> curve)
      : NumericalError(msg), curve_(std::move(curve)) {}
  const std::vector<std::pair<double, double>>& curve() const { return curve_; }

 private:
  std::vector<std::pair<double, double>> curve_;
};

struct CalibrationResult {
  Contract contract;
  double parameter = 0.0;
  double target_mw = 0.0;
  int iterations = 0;
  // Risk-adjusted profit at the target, ~0; with the capacity bisection
  // fallback, rho of the returned equilibrium.
  double rho_at_target = 0.0;
  EquilibriumResult equilibrium;
  double residual_mw = 0.0;  // equilibrium capacity - target
  double grid_step_mw = 0.0;
  // (parameter, grid-level equilibrium capacity), increasing parameter.
  std::vector<std::pair<double, double>> curve;
};

struct CalibrationOptions {
  std::optional<ParameterBounds> bounds;
  int curve_points = 11;
  double parameter_tolerance = 1e-12;  // relative to the bounds width
  int max_iterations = 200;
};

// The risk-adjusted profit at the target is nondecreasing in the free
// parameter for every family, so the parameter that makes it zero places a
// crossing at the target; it is found by bisection on cached evaluations.
// The grid-level equilibrium over the bounds brackets the target and must be
// monotone; the final contract is re-solved with find_equilibrium. When that
// lands more than one grid step from the target (the target sits on a basis
// change), the parameter is bisected on the equilibrium capacity instead.
CalibrationResult calibrate(Evaluator& evaluator, ContractFamily family, double target_mw,
                            const InvestorProfile& profile, const GridSpec& grid = {},
                            const CalibrationOptions& options = {});

}  // namespace ldes
