#include "ldes/expansion.hpp"

#include <cmath>
#include <sstream>

#include "ldes/errors.hpp"
#include "ldes/parallel.hpp"

namespace ldes {

namespace {

// Below this capacity per-MW revenues come from LP duals instead of dispatch.
constexpr double kPerMwFloor = 1e-3;

double scaled_gap(double revenue, double fixed_cost) { return (revenue - fixed_cost) / std::max(fixed_cost, 1.0); }

}  // namespace

ExpansionLP build_expansion(const SystemConfig& config, const Capacities& fixed) {
  for (const auto& [name, v] : fixed) {
    const auto k = config.technology_index(name);
    if (!k) throw ValidationError("capacities." + name, "unknown resource");
    if (!(v >= 0.0)) throw ValidationError("capacities." + name, "capacity must be >= 0");
  }
  ExpansionLP e;
  std::vector<CapacityRef> refs;
  for (const auto& tech : config.technologies) {
    auto it = fixed.find(tech.name);
    if (tech.investable()) {
      double lo = 0.0, hi = tech.cap_max;
      if (it != fixed.end()) lo = hi = it->second;
      const int col = e.model.add_column(tech.fixed_cost(), lo, hi, "cap_" + tech.name);
      e.capacity_columns.push_back(col);
      e.constant_capacity.push_back(0.0);
      refs.push_back({0.0, col});
    } else {
      const double v = it != fixed.end() ? it->second : *tech.cap_fixed;
      e.capacity_columns.push_back(-1);
      e.constant_capacity.push_back(v);
      refs.push_back({v, -1});
    }
  }
  for (std::size_t s = 0; s < config.scenarios.size(); ++s) {
    e.blocks.push_back(add_scenario_block(e.model, config, s, refs, config.scenarios[s].probability,
                                          "s" + std::to_string(s) + "_"));
  }
  return e;
}

ExpansionOutcome extract_outcome(const SystemConfig& config, const ExpansionLP& lp, const lp::Simplex& solver) {
  ExpansionOutcome out;
  out.stats = solver.stats();
  const std::size_t R = config.technologies.size();
  std::vector<double> caps(R);
  for (std::size_t r = 0; r < R; ++r) {
    const int col = lp.capacity_columns[r];
    caps[r] = col >= 0 ? std::max(0.0, solver.column_value(col)) : lp.constant_capacity[r];
    out.capacities[config.technologies[r].name] = caps[r];
  }
  auto x = [&](int j) { return solver.column_value(j); };
  auto y = [&](int i) { return solver.row_dual(i); };
  double welfare = 0.0;
  for (const auto& b : lp.blocks) {
    out.scenarios.push_back(extract_result(config, b, caps, x, y));
    welfare += out.scenarios.back().probability * out.scenarios.back().welfare;
  }
  for (std::size_t r = 0; r < R; ++r) {
    const int col = lp.capacity_columns[r];
    if (col < 0) continue;
    const Technology& tech = config.technologies[r];
    welfare -= tech.fixed_cost() * caps[r];
    double rev = 0.0;
    if (caps[r] >= kPerMwFloor) {
      for (const auto& s : out.scenarios) rev += s.probability * s.net_revenue_per_mw.at(tech.name);
    } else {
      rev = tech.fixed_cost() - solver.reduced_cost(col);
    }
    out.expected_revenue[tech.name] = rev;
  }
  out.expected_welfare = welfare;
  return out;
}

std::map<std::string, double> zero_profit_residuals(const SystemConfig& config, const ExpansionOutcome& outcome,
                                                    const Capacities& fixed) {
  std::map<std::string, double> res;
  for (const auto& tech : config.technologies) {
    if (!tech.investable() || fixed.count(tech.name)) continue;
    const double c = outcome.capacities.at(tech.name);
    const double gap = scaled_gap(outcome.expected_revenue.at(tech.name), tech.fixed_cost());
    const double scale = std::max(1.0, tech.cap_max);
    if (c <= 1e-6 * scale) {
      res[tech.name] = std::max(gap, 0.0);
    } else if (c >= tech.cap_max - 1e-6 * scale) {
      res[tech.name] = std::max(-gap, 0.0);
    } else {
      res[tech.name] = std::abs(gap);
    }
  }
  return res;
}

ExpansionOutcome solve_expansion(const SystemConfig& config, const Capacities& fixed, const lp::SimplexOptions& options) {
  ExpansionLP lp = build_expansion(config, fixed);
  lp::Simplex s(lp.model, options);
  if (s.solve() != lp::Status::Optimal) throw NumericalError("expansion LP: " + s.diagnostics());
  ExpansionOutcome out = extract_outcome(config, lp, s);
  const auto res = zero_profit_residuals(config, out, fixed);
  std::ostringstream bad;
  for (const auto& [name, r] : res) {
    if (r > kZeroProfitTolerance) bad << " " << name << " gap=" << r;
  }
  if (!bad.str().empty()) throw NumericalError("zero-profit verification failed:" + bad.str());
  return out;
}

Capacities risk_neutral_expansion(const SystemConfig& config, const Capacities& fixed) {
  return solve_expansion(config, fixed).capacities;
}

CashflowDistribution contracted_cashflows(const SystemConfig& config, const CapacityEvaluation& e,
                                          const Contract* contract, const InvestorProfile& profile) {
  const Technology& tech = config.contracted();
  CashflowDistribution d;
  d.probabilities = e.probabilities;
  d.values.reserve(e.exposures.size());
  for (const auto& x : e.exposures) {
    d.values.push_back(settled_revenue(contract, x, tech, profile.risk_free_rate) - tech.fixed_cost());
  }
  return d;
}

double risk_adjusted(const SystemConfig& config, const CapacityEvaluation& e, const Contract* contract,
                     const InvestorProfile& profile) {
  return risk_adjusted_profit(contracted_cashflows(config, e, contract, profile), profile);
}

Evaluator::Evaluator(const SystemConfig& config, EvaluatorOptions options) : config_(config), options_(options) {
  const auto k = config_.technology_index(config_.contract_technology);
  if (!k) throw ValidationError("system.contract_technology", "unknown technology");
  contract_index_ = *k;
  if (!contracted().investable()) {
    throw ValidationError("system.contract_technology", "the contracted technology must be investable");
  }
  lp_ = build_expansion(config_, {{contracted().name, 0.5 * contracted().cap_max}});
  column_ = lp_.capacity_columns[contract_index_];
}

double Evaluator::epsilon_capacity() const { return std::min(1.0, 1e-4 * capacity_bound()); }

const lp::Simplex& Evaluator::snapshot() {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  if (!snapshot_) {
    lp::Simplex s(lp_.model, options_.simplex);
    ++solves_;
    if (s.solve() != lp::Status::Optimal) throw NumericalError("expansion LP (reference point): " + s.diagnostics());
    snapshot_.emplace(std::move(s));
  }
  return *snapshot_;
}

lp::Simplex Evaluator::solve_at(double capacity) {
  lp::Simplex s = snapshot();
  s.set_column_bounds(column_, capacity, capacity);
  ++solves_;
  if (s.solve() != lp::Status::Optimal) {
    throw NumericalError("expansion LP at " + contracted().name + " = " + std::to_string(capacity) +
                         " MW: " + s.diagnostics());
  }
  return s;
}

CapacityEvaluation Evaluator::evaluation_from(const lp::Simplex& s, double requested, double solved) const {
  CapacityEvaluation e;
  e.capacity = requested;
  e.solved_capacity = solved;
  e.outcome = extract_outcome(config_, lp_, s);
  for (const auto& r : e.outcome.scenarios) {
    e.exposures.push_back(exposure_of(r, contracted()));
    e.probabilities.push_back(r.probability);
  }
  return e;
}

std::shared_ptr<const CapacityEvaluation> Evaluator::evaluate(double capacity) {
  if (!(capacity >= 0.0 && capacity <= capacity_bound())) {
    throw ValidationError("capacities." + contracted().name, "outside [0, cap_max]");
  }
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (auto it = cache_.find(capacity); it != cache_.end()) return it->second;
  }
  const double solved = std::max(capacity, epsilon_capacity());
  auto e = std::make_shared<const CapacityEvaluation>(evaluation_from(solve_at(solved), capacity, solved));
  std::lock_guard<std::mutex> lock(cache_mu_);
  return cache_.emplace(capacity, e).first->second;
}

void Evaluator::evaluate_all(const std::vector<double>& capacities) {
  snapshot();
  parallel_for(capacities.size(), options_.workers, [&](std::size_t i) { evaluate(capacities[i]); });
}

long Evaluator::lp_solves() const { return solves_.load(); }

namespace {

CapacityEvaluation blend_evaluations(const SystemConfig& config, const CapacityEvaluation& a,
                                     const CapacityEvaluation& b, double theta) {
  CapacityEvaluation e = a;
  e.outcome.scenarios.clear();
  e.exposures.clear();
  const Technology& tech = config.contracted();
  for (std::size_t s = 0; s < a.outcome.scenarios.size(); ++s) {
    e.outcome.scenarios.push_back(blend(a.outcome.scenarios[s], b.outcome.scenarios[s], theta, config));
    e.exposures.push_back(exposure_of(e.outcome.scenarios.back(), tech));
  }
  for (auto& [name, c] : e.outcome.capacities) {
    c = theta * a.outcome.capacities.at(name) + (1.0 - theta) * b.outcome.capacities.at(name);
  }
  e.outcome.expected_welfare = theta * a.outcome.expected_welfare + (1.0 - theta) * b.outcome.expected_welfare;
  for (auto& [name, rev] : e.outcome.expected_revenue) {
    if (e.outcome.capacities.at(name) >= kPerMwFloor) {
      rev = 0.0;
      for (const auto& s : e.outcome.scenarios) rev += s.probability * s.net_revenue_per_mw.at(name);
    } else {
      rev = theta * a.outcome.expected_revenue.at(name) + (1.0 - theta) * b.outcome.expected_revenue.at(name);
    }
  }
  return e;
}

}  // namespace

namespace {

constexpr int kBlendIterations = 200;

double step_h(double bound) { return 1e-7 * std::max(1.0, bound * 1e-4); }

// Bisects theta in [0, 1] on the blend of `a` (theta = 1) and `b` for the
// profit nearest zero, given rho_of(a) > 0 >= rho_of(b).
template <class Rho>
Evaluator::Resolution bisect_blend(const SystemConfig& config, const CapacityEvaluation& a,
                                   const CapacityEvaluation& b, double rho_b, double tol, Rho rho_of) {
  Evaluator::Resolution res;
  res.evaluation = b;
  res.rho = rho_b;
  res.blend = 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kBlendIterations && std::abs(res.rho) > tol && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    CapacityEvaluation me = blend_evaluations(config, a, b, mid);
    const double r = rho_of(me);
    if (r > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (std::abs(r) <= std::abs(res.rho)) {
      res.evaluation = std::move(me);
      res.rho = r;
      res.blend = mid;
    }
  }
  return res;
}

}  // namespace

CapacityEvaluation Evaluator::one_sided(double capacity, double direction) {
  const double solved = std::max(capacity, epsilon_capacity());
  const double from = solved + direction * step_h(capacity_bound());
  if (from < epsilon_capacity() || from > capacity_bound()) return evaluation_from(solve_at(solved), capacity, solved);
  lp::Simplex s = solve_at(from);
  s.set_column_bounds(column_, solved, solved);
  ++solves_;
  if (s.solve() != lp::Status::Optimal) throw NumericalError("one-sided solve: " + s.diagnostics());
  return evaluation_from(s, capacity, solved);
}

Evaluator::Resolution Evaluator::resolve_at(double capacity, const Contract* contract,
                                            const InvestorProfile& profile) {
  if (!(capacity >= 0.0 && capacity <= capacity_bound())) {
    throw ValidationError("capacities." + contracted().name, "outside [0, cap_max]");
  }
  const double tol = 1e-10 * std::max(contracted().fixed_cost(), 1.0);
  auto rho_of = [&](const CapacityEvaluation& e) { return risk_adjusted(config_, e, contract, profile); };
  CapacityEvaluation le = one_sided(capacity, -1.0);
  CapacityEvaluation re = one_sided(capacity, 1.0);
  const double rl = rho_of(le), rr = rho_of(re);
  if (rl > 0.0 && rr <= 0.0) return bisect_blend(config_, le, re, rr, tol, rho_of);
  if (rr > 0.0 && rl <= 0.0) {
    Resolution res = bisect_blend(config_, re, le, rl, tol, rho_of);
    res.blend = 1.0 - res.blend;
    return res;
  }
  Resolution res;
  const bool left = std::abs(rl) <= std::abs(rr);
  res.evaluation = left ? std::move(le) : std::move(re);
  res.rho = left ? rl : rr;
  res.blend = left ? 1.0 : 0.0;
  return res;
}

Evaluator::Resolution Evaluator::resolve_crossing(double a, double b, const Contract* contract,
                                                  const InvestorProfile& profile) {
  const double F = contracted().fixed_cost();
  const double rho_tol = 1e-10 * std::max(F, 1.0);
  const double h = step_h(capacity_bound());
  auto rho_of = [&](const CapacityEvaluation& e) { return risk_adjusted(config_, e, contract, profile); };
  auto moved = [&](const lp::Simplex& base, double c) {
    lp::Simplex t = base;
    t.set_column_bounds(column_, c, c);
    return t;
  };

  double cur = std::max(a, epsilon_capacity());
  lp::Simplex s = solve_at(cur);
  Resolution res;
  for (int piece = 0; piece < 20000; ++piece) {
    res.pieces = piece + 1;
    const double lim = s.parametric_limit(column_, 1.0);
    const double end = std::min(b, cur + lim);
    lp::Simplex left = moved(s, end);
    CapacityEvaluation le = evaluation_from(left, end, end);
    const double rho_end = rho_of(le);

    if (rho_end <= 0.0) {
      // The zero lies inside this piece, where the basis stays optimal.
      double lo = cur, hi = end;
      res.evaluation = le;
      res.rho = rho_end;
      for (int it = 0; it < 200 && std::abs(res.rho) > rho_tol && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        CapacityEvaluation me = evaluation_from(moved(s, mid), mid, mid);
        const double r = rho_of(me);
        if (r > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (std::abs(r) <= std::abs(res.rho)) {
          res.evaluation = std::move(me);
          res.rho = r;
        }
      }
      return res;
    }

    // Breakpoint at `end`: the next basis, moved back onto the breakpoint.
    lp::Simplex right = end >= b ? solve_at(b) : moved(left, end + h);
    if (end < b) {
      ++solves_;
      if (right.solve() != lp::Status::Optimal) throw NumericalError("parametric step: " + right.diagnostics());
    }
    CapacityEvaluation re = evaluation_from(end >= b ? right : moved(right, end), end, end);
    const double rho_right = rho_of(re);
    if (rho_right <= 0.0 || end >= b) {
      Resolution r = bisect_blend(config_, le, re, rho_right, rho_tol, rho_of);
      r.pieces = res.pieces;
      return r;
    }
    s = std::move(right);
    cur = end + h;
  }
  throw NumericalError("crossing resolution did not terminate");
}

}  // namespace ldes
