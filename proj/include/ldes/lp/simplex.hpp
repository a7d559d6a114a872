#pragma once

// Bounded-variable simplex with an explicit dense basis inverse.
//
// The solver runs the dual simplex (dual steepest-edge pricing, Harris ratio
// test) from a dual-feasible basis and falls back to primal simplex passes
// to clean up residual dual infeasibilities. A solved instance keeps its
// basis, so changing column bounds and calling solve() again warm-starts.
//
// All pivoting rules break ties on the smallest index, so a given sequence
// of calls always reproduces the same vertex and the same duals.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ldes/lp/model.hpp"

namespace ldes::lp {

enum class Status { NotSolved, Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

std::string_view to_string(Status s);

struct SimplexOptions {
  double primal_tolerance = 1e-7;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  long max_iterations = 1'000'000;
  int refresh_interval = 256;
};

struct SimplexStats {
  long dual_iterations = 0;
  long primal_iterations = 0;
  long bound_flips = 0;
  int reinversions = 0;
};

class Simplex {
 public:
  explicit Simplex(Model model, SimplexOptions options = {});

  Status solve();

  // Keeps the current basis; the next solve() starts from it.
  void set_column_bounds(int col, double lower, double upper);

  Status status() const { return status_; }
  double objective() const;
  double column_value(int col) const { return x_[col]; }
  std::vector<double> column_values() const;
  double row_activity(int row) const { return -x_[n_ + row]; }
  // Sensitivity of the optimal objective to the bound of the row that is
  // active (equality rows: to its right-hand side).
  double row_dual(int row) const;
  double reduced_cost(int col) const;
  bool is_basic(int col) const { return state_[col] == kBasic; }

  // Largest t >= 0 such that moving nonbasic column `col` by direction * t
  // keeps the current basis primal feasible. kInf when nothing blocks.
  double parametric_limit(int col, double direction) const;

  double max_primal_infeasibility() const;
  double max_dual_infeasibility() const;

  const Model& model() const { return model_; }
  const SimplexStats& stats() const { return stats_; }
  const SimplexOptions& options() const { return options_; }
  std::string diagnostics() const;

 private:
  enum State : std::uint8_t { kBasic, kLower, kUpper, kZero, kFixed };

  struct ColumnView {
    const int* rows;
    const double* values;
    int size;
    int unit_row;  // >= 0 for logical columns
  };

  ColumnView column(int j) const;
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }
  double* binv_row(int i) { return binv_.data() + static_cast<std::size_t>(i) * m_; }
  const double* binv_row(int i) const {
    return binv_.data() + static_cast<std::size_t>(i) * m_;
  }

  void init_slack_basis();
  void place_nonbasic(int j);
  void compute_primal();
  void compute_duals();
  void compute_dse_weights();
  bool reinvert();
  void refresh();
  void ftran(int j, std::vector<double>& out) const;
  void pivot_row(int r, std::vector<double>& alpha) const;
  void apply_pivot(int r, int q, const std::vector<double>& alpha_col);
  double infeasibility(int i) const;
  int fix_dual_infeasibilities(double tol);
  void shift_primal(const std::vector<double>& delta_rhs);

  Status dual_phase();
  Status primal_phase();
  bool iteration_budget_left() const;

  Model model_;
  SimplexOptions options_;
  SimplexStats stats_;
  Status status_ = Status::NotSolved;

  int n_ = 0;
  int m_ = 0;
  double obj_scale_ = 1.0;
  std::vector<int> col_ptr_, row_idx_;
  std::vector<double> val_;
  std::vector<double> cost_, lo_, hi_;
  std::vector<std::uint8_t> boxed_artificially_;
  std::vector<double> x_, d_, y_;
  std::vector<std::uint8_t> state_;
  std::vector<int> head_, pos_;
  std::vector<double> binv_;
  std::vector<double> dse_;
  bool has_basis_ = false;
  long since_refresh_ = 0;
};

}  // namespace ldes::lp
