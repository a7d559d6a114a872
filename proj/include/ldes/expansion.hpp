#pragma once

// Risk-neutral capacity expansion: one two-stage LP over all scenarios that
// maximizes expected welfare net of annualized fixed costs. Its optimum is
// the zero-expected-profit equilibrium of risk-neutral investors.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ldes/contracts.hpp"
#include "ldes/dispatch.hpp"
#include "ldes/lp/simplex.hpp"
#include "ldes/model.hpp"

namespace ldes {

struct ExpansionLP {
  lp::Model model;
  std::vector<ScenarioBlock> blocks;
  // Per technology: capacity column, or -1 when the capacity is a constant.
  std::vector<int> capacity_columns;
  std::vector<double> constant_capacity;
};

// Investable technologies get a capacity column with cost F on [0, cap_max].
// Entries of `fixed` pin an investable technology by giving its column
// equal bounds, so the pin can later be moved on a solved LP.
ExpansionLP build_expansion(const SystemConfig& config, const Capacities& fixed);

struct ExpansionOutcome {
  Capacities capacities;
  std::vector<DispatchResult> scenarios;
  // sum_w p_w U_w - sum_r F_r c_r over investable technologies.
  double expected_welfare = 0.0;
  // Expected net revenue per MW of every investable technology. Taken from
  // the dispatch when the capacity is positive, and from the marginal value
  // of capacity (LP duals) at zero.
  std::map<std::string, double> expected_revenue;
  lp::SimplexStats stats;
};

ExpansionOutcome extract_outcome(const SystemConfig& config, const ExpansionLP& lp, const lp::Simplex& solver);

// Complementarity gaps (E[pi] - F) / F for technologies that are free in
// the expansion: interior capacities must have |gap| <= tol, zero
// capacities gap <= tol, capacities at cap_max gap >= -tol. Returns the
// scaled residual per technology.
std::map<std::string, double> zero_profit_residuals(const SystemConfig& config, const ExpansionOutcome& outcome,
                                                    const Capacities& fixed);

// Solves the expansion and verifies zero profits within 0.1% of F
// (NumericalError listing the gaps otherwise).
ExpansionOutcome solve_expansion(const SystemConfig& config, const Capacities& fixed,
                                 const lp::SimplexOptions& options = {});
Capacities risk_neutral_expansion(const SystemConfig& config, const Capacities& fixed);

inline constexpr double kZeroProfitTolerance = 1e-3;

struct EvaluatorOptions {
  int workers = 1;
  lp::SimplexOptions simplex;
};

// Expansion outcome with the contracted technology pinned at one capacity.
struct CapacityEvaluation {
  double capacity = 0.0;         // requested
  double solved_capacity = 0.0;  // a small positive stand-in for zero
  ExpansionOutcome outcome;
  std::vector<ScenarioExposure> exposures;
  std::vector<double> probabilities;
};

// Per-scenario net cashflows u = pi + kappa - F of the contracted
// technology, and their risk-adjusted value.
CashflowDistribution contracted_cashflows(const SystemConfig& config, const CapacityEvaluation& e,
                                          const Contract* contract, const InvestorProfile& profile);
double risk_adjusted(const SystemConfig& config, const CapacityEvaluation& e, const Contract* contract,
                     const InvestorProfile& profile);

// Solves the expansion LP with the contracted technology pinned, for any
// number of capacities. Every solve warm-starts from the same snapshot (the
// LP solved at half the capacity bound), so an evaluation depends on the
// capacity alone. Results are cached; contracts and risk preferences do not
// affect dispatch, so one cache serves every mechanism and investor.
class Evaluator {
 public:
  explicit Evaluator(const SystemConfig& config, EvaluatorOptions options = {});

  const SystemConfig& config() const { return config_; }
  const Technology& contracted() const { return config_.technologies[contract_index_]; }
  double capacity_bound() const { return contracted().cap_max; }
  // Capacity solved in place of zero.
  double epsilon_capacity() const;

  std::shared_ptr<const CapacityEvaluation> evaluate(double capacity);
  // Fills the cache for all capacities, in parallel when workers > 1.
  void evaluate_all(const std::vector<double>& capacities);

  // Locates a zero of the risk-adjusted profit in [a, b], given rho(a) > 0
  // and rho(b) <= 0, by walking the LP's basis pieces from a. Within a piece
  // the search bisects on capacity; at a breakpoint where the profit jumps
  // through zero it blends the two optimal primal-dual solutions. The result
  // is an optimal solution of the expansion at the returned capacity.
  struct Resolution {
    CapacityEvaluation evaluation;
    double rho = 0.0;
    double blend = 1.0;  // weight on the left solution at a breakpoint
    int pieces = 0;
  };
  Resolution resolve_crossing(double a, double b, const Contract* contract, const InvestorProfile& profile);

  // At a capacity where the basis changes, the optimal duals are not
  // unique. This picks, among blends of the solutions just left and just
  // right of `capacity`, the one whose risk-adjusted profit is nearest zero.
  // Away from breakpoints it is the plain evaluation.
  Resolution resolve_at(double capacity, const Contract* contract, const InvestorProfile& profile);

  long lp_solves() const;
  const ExpansionLP& lp() const { return lp_; }

 private:
  const lp::Simplex& snapshot();
  lp::Simplex solve_at(double capacity);
  // Optimal solution at `capacity` reached from capacity + direction * h.
  CapacityEvaluation one_sided(double capacity, double direction);
  CapacityEvaluation evaluation_from(const lp::Simplex& s, double requested, double solved) const;

  SystemConfig config_;
  EvaluatorOptions options_;
  std::size_t contract_index_ = 0;
  ExpansionLP lp_;
  int column_ = -1;
  std::optional<lp::Simplex> snapshot_;
  std::mutex snapshot_mu_;
  std::mutex cache_mu_;
  std::map<double, std::shared_ptr<const CapacityEvaluation>> cache_;
  std::atomic<long> solves_{0};
};

}  // namespace ldes
