#include "ldes/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldes/simd/kernels.hpp"

namespace ldes::lp {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::NotSolved: return "not-solved";
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kArtificialBox = 1e10;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Simplex::Simplex(Model model, SimplexOptions options)
    : model_(std::move(model)), options_(options) {
  n_ = model_.num_columns();
  m_ = model_.num_rows();
  const int total = n_ + m_;

  col_ptr_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) {
    col_ptr_[j + 1] = col_ptr_[j] + static_cast<int>(model_.column(j).size());
  }
  row_idx_.resize(col_ptr_[n_]);
  val_.resize(col_ptr_[n_]);
  for (int j = 0; j < n_; ++j) {
    int k = col_ptr_[j];
    for (const auto& e : model_.column(j)) {
      row_idx_[k] = e.index;
      val_[k] = e.value;
      ++k;
    }
  }

  double cmax = 0.0;
  for (int j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(model_.cost(j)));
  obj_scale_ = cmax > 0.0 ? std::ldexp(1.0, -std::ilogb(cmax)) : 1.0;

  cost_.assign(total, 0.0);
  lo_.resize(total);
  hi_.resize(total);
  for (int j = 0; j < n_; ++j) {
    cost_[j] = model_.cost(j) * obj_scale_;
    lo_[j] = model_.column_lower(j);
    hi_[j] = model_.column_upper(j);
  }
  for (int i = 0; i < m_; ++i) {
    lo_[n_ + i] = -model_.row_upper(i);
    hi_[n_ + i] = -model_.row_lower(i);
  }
  boxed_artificially_.assign(total, 0);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  y_.assign(m_, 0.0);
  state_.assign(total, kLower);
  head_.assign(m_, -1);
  pos_.assign(total, -1);
}

Simplex::ColumnView Simplex::column(int j) const {
  if (j < n_) {
    return {row_idx_.data() + col_ptr_[j], val_.data() + col_ptr_[j],
            col_ptr_[j + 1] - col_ptr_[j], -1};
  }
  return {nullptr, nullptr, 0, j - n_};
}

void Simplex::place_nonbasic(int j) {
  const double tol = options_.dual_tolerance;
  double l = lo_[j];
  double u = hi_[j];
  if (l == u) {
    state_[j] = kFixed;
    x_[j] = l;
    return;
  }
  if (finite(l) && finite(u)) {
    state_[j] = d_[j] >= 0.0 ? kLower : kUpper;
  } else if (finite(l)) {
    if (d_[j] >= -tol) {
      state_[j] = kLower;
    } else {
      hi_[j] = l + kArtificialBox * std::max(1.0, std::abs(l));
      boxed_artificially_[j] = 1;
      state_[j] = kUpper;
    }
  } else if (finite(u)) {
    if (d_[j] <= tol) {
      state_[j] = kUpper;
    } else {
      lo_[j] = u - kArtificialBox * std::max(1.0, std::abs(u));
      boxed_artificially_[j] = 1;
      state_[j] = kLower;
    }
  } else if (std::abs(d_[j]) <= tol) {
    state_[j] = kZero;
  } else if (d_[j] > 0.0) {
    lo_[j] = -kArtificialBox;
    boxed_artificially_[j] = 1;
    state_[j] = kLower;
  } else {
    hi_[j] = kArtificialBox;
    boxed_artificially_[j] = 1;
    state_[j] = kUpper;
  }
  x_[j] = state_[j] == kLower ? lo_[j] : state_[j] == kUpper ? hi_[j] : 0.0;
}

void Simplex::init_slack_basis() {
  const std::size_t mm = static_cast<std::size_t>(m_) * m_;
  binv_.assign(mm, 0.0);
  for (int i = 0; i < m_; ++i) {
    binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    state_[n_ + i] = kBasic;
  }
  for (int j = 0; j < n_; ++j) {
    d_[j] = cost_[j];
    place_nonbasic(j);
  }
  compute_primal();
  compute_duals();
  dse_.assign(m_, 1.0);
  has_basis_ = true;
  since_refresh_ = 0;
}

void Simplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == kBasic || x_[j] == 0.0) continue;
    const ColumnView c = column(j);
    if (c.unit_row >= 0) {
      rhs[c.unit_row] -= x_[j];
    } else {
      for (int k = 0; k < c.size; ++k) rhs[c.rows[k]] -= c.values[k] * x_[j];
    }
  }
  const auto& kern = simd::active();
  for (int i = 0; i < m_; ++i) {
    x_[head_[i]] = kern.dot(binv_row(i), rhs.data(), m_);
  }
}

void Simplex::compute_duals() {
  std::fill(y_.begin(), y_.end(), 0.0);
  const auto& kern = simd::active();
  for (int i = 0; i < m_; ++i) {
    const double c = cost_[head_[i]];
    if (c != 0.0) kern.axpy(c, binv_row(i), y_.data(), m_);
  }
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == kBasic) {
      d_[j] = 0.0;
      continue;
    }
    const ColumnView c = column(j);
    if (c.unit_row >= 0) {
      d_[j] = cost_[j] - y_[c.unit_row];
    } else {
      double s = cost_[j];
      for (int k = 0; k < c.size; ++k) s -= c.values[k] * y_[c.rows[k]];
      d_[j] = s;
    }
  }
}

void Simplex::compute_dse_weights() {
  dse_.resize(m_);
  const auto& kern = simd::active();
  for (int i = 0; i < m_; ++i) dse_[i] = std::max(kern.sum_squares(binv_row(i), m_), 1e-12);
}

bool Simplex::reinvert() {
  ++stats_.reinversions;
  const std::size_t m = static_cast<std::size_t>(m_);
  std::vector<double> a(m * m, 0.0);
  for (int k = 0; k < m_; ++k) {
    const ColumnView c = column(head_[k]);
    if (c.unit_row >= 0) {
      a[static_cast<std::size_t>(c.unit_row) * m + k] = 1.0;
    } else {
      for (int t = 0; t < c.size; ++t) a[static_cast<std::size_t>(c.rows[t]) * m + k] = c.values[t];
    }
  }
  binv_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;

  const auto& kern = simd::active();
  std::vector<double> tmp(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t p = k;
    double best = std::abs(a[k * m + k]);
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = std::abs(a[i * m + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-12) return false;
    if (p != k) {
      std::swap_ranges(a.begin() + p * m, a.begin() + (p + 1) * m, a.begin() + k * m);
      std::swap_ranges(binv_.begin() + p * m, binv_.begin() + (p + 1) * m, binv_.begin() + k * m);
    }
    double* ak = a.data() + k * m;
    double* bk = binv_.data() + k * m;
    const double inv = 1.0 / ak[k];
    kern.scale(inv, ak + k, m - k);
    ak[k] = 1.0;
    // Nonzero span of the inverse row keeps the elimination sparse.
    std::size_t lo = 0;
    std::size_t hi = m;
    while (lo < m && bk[lo] == 0.0) ++lo;
    while (hi > lo && bk[hi - 1] == 0.0) --hi;
    kern.scale(inv, bk + lo, hi - lo);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k) continue;
      double* ai = a.data() + i * m;
      const double f = ai[k];
      if (f == 0.0) continue;
      kern.axpy(-f, ak + k + 1, ai + k + 1, m - k - 1);
      ai[k] = 0.0;
      kern.axpy(-f, bk + lo, binv_.data() + i * m + lo, hi - lo);
    }
  }
  compute_primal();
  compute_duals();
  compute_dse_weights();
  since_refresh_ = 0;
  return true;
}

void Simplex::refresh() {
  compute_primal();
  compute_duals();
  since_refresh_ = 0;
}

void Simplex::ftran(int j, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  const ColumnView c = column(j);
  const std::size_t m = static_cast<std::size_t>(m_);
  if (c.unit_row >= 0) {
    for (std::size_t i = 0; i < m; ++i) out[i] = binv_[i * m + c.unit_row];
    return;
  }
  for (int t = 0; t < c.size; ++t) {
    const double v = c.values[t];
    const double* col = binv_.data() + c.rows[t];
    for (std::size_t i = 0; i < m; ++i) out[i] += col[i * m] * v;
  }
}

void Simplex::pivot_row(int r, std::vector<double>& alpha) const {
  const double* rho = binv_row(r);
  alpha.assign(n_ + m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == kBasic || state_[j] == kFixed) continue;
    double s = 0.0;
    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += rho[row_idx_[k]] * val_[k];
    alpha[j] = s;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (state_[j] == kBasic || state_[j] == kFixed) continue;
    alpha[j] = rho[i];
  }
}

void Simplex::apply_pivot(int r, int q, const std::vector<double>& alpha_col) {
  const auto& kern = simd::active();
  const std::size_t m = static_cast<std::size_t>(m_);
  double* pr = binv_row(r);
  std::size_t lo = 0;
  std::size_t hi = m;
  while (lo < m && pr[lo] == 0.0) ++lo;
  while (hi > lo && pr[hi - 1] == 0.0) --hi;
  const std::size_t len = hi - lo;
  kern.scale(1.0 / alpha_col[r], pr + lo, len);
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    const double f = alpha_col[i];
    if (f == 0.0) continue;
    double* ri = binv_row(i) + lo;
    const double before = kern.sum_squares(ri, len);
    kern.axpy(-f, pr + lo, ri, len);
    const double after = kern.sum_squares(ri, len);
    dse_[i] += after - before;
    if (!(dse_[i] > 1e-12)) dse_[i] = std::max(kern.sum_squares(binv_row(i), m), 1e-12);
  }
  dse_[r] = std::max(kern.sum_squares(pr + lo, len), 1e-12);

  const int leaving = head_[r];
  pos_[leaving] = -1;
  head_[r] = q;
  pos_[q] = r;
  state_[q] = kBasic;
  d_[q] = 0.0;
  ++since_refresh_;
}

double Simplex::infeasibility(int i) const {
  const int j = head_[i];
  const double v = x_[j];
  const double tol = options_.primal_tolerance;
  if (v < lo_[j] - tol) return v - lo_[j];
  if (v > hi_[j] + tol) return v - hi_[j];
  return 0.0;
}

void Simplex::shift_primal(const std::vector<double>& delta_rhs) {
  const std::size_t m = static_cast<std::size_t>(m_);
  for (std::size_t k = 0; k < m; ++k) {
    const double v = delta_rhs[k];
    if (v == 0.0) continue;
    const double* col = binv_.data() + k;
    for (std::size_t i = 0; i < m; ++i) x_[head_[i]] += col[i * m] * v;
  }
}

int Simplex::fix_dual_infeasibilities(double tol) {
  std::vector<double> delta(m_, 0.0);
  int flips = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    const std::uint8_t s = state_[j];
    double move = 0.0;
    if (s == kLower && d_[j] < -tol && finite(hi_[j])) {
      move = hi_[j] - x_[j];
      state_[j] = kUpper;
      x_[j] = hi_[j];
    } else if (s == kUpper && d_[j] > tol && finite(lo_[j])) {
      move = lo_[j] - x_[j];
      state_[j] = kLower;
      x_[j] = lo_[j];
    } else {
      continue;
    }
    ++flips;
    const ColumnView c = column(j);
    if (c.unit_row >= 0) {
      delta[c.unit_row] -= move;
    } else {
      for (int k = 0; k < c.size; ++k) delta[c.rows[k]] -= c.values[k] * move;
    }
  }
  if (flips > 0) {
    shift_primal(delta);
    stats_.bound_flips += flips;
  }
  return flips;
}

bool Simplex::iteration_budget_left() const {
  return stats_.dual_iterations + stats_.primal_iterations < options_.max_iterations;
}

Status Simplex::dual_phase() {
  const double dtol = options_.dual_tolerance;
  const double ptol = options_.pivot_tolerance;
  std::vector<double> alpha_row;
  std::vector<double> alpha_col;
  bool retried = false;
  while (true) {
    if (!iteration_budget_left()) return Status::IterationLimit;
    if (since_refresh_ >= options_.refresh_interval) {
      refresh();
      fix_dual_infeasibilities(dtol);
    }

    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double delta = infeasibility(i);
      if (delta == 0.0) continue;
      const double score = delta * delta / dse_[i];
      if (score > best) {
        best = score;
        r = i;
      }
    }
    if (r < 0) return Status::Optimal;

    const int leaving = head_[r];
    const bool to_upper = infeasibility(r) > 0.0;
    const double sign = to_upper ? 1.0 : -1.0;
    pivot_row(r, alpha_row);

    double amax = 0.0;
    for (int j = 0; j < n_ + m_; ++j) amax = std::max(amax, std::abs(alpha_row[j]));
    const double atol = ptol * std::max(1.0, amax);

    double theta_max = lp::kInf;
    for (int j = 0; j < n_ + m_; ++j) {
      const std::uint8_t s = state_[j];
      if (s == kBasic || s == kFixed) continue;
      const double a = sign * alpha_row[j];
      if (s == kLower && a > atol) {
        theta_max = std::min(theta_max, (d_[j] + dtol) / a);
      } else if (s == kUpper && a < -atol) {
        theta_max = std::min(theta_max, (d_[j] - dtol) / a);
      } else if (s == kZero && std::abs(a) > atol) {
        theta_max = std::min(theta_max, dtol / std::abs(a));
      }
    }
    if (!(theta_max < lp::kInf)) {
      if (!retried) {
        retried = true;
        if (!reinvert()) return Status::NumericalFailure;
        continue;
      }
      return Status::Infeasible;
    }

    int q = -1;
    double qa = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      const std::uint8_t s = state_[j];
      if (s == kBasic || s == kFixed) continue;
      const double a = sign * alpha_row[j];
      double ratio;
      if (s == kLower && a > atol) {
        ratio = d_[j] / a;
      } else if (s == kUpper && a < -atol) {
        ratio = d_[j] / a;
      } else if (s == kZero && std::abs(a) > atol) {
        ratio = 0.0;
      } else {
        continue;
      }
      if (ratio <= theta_max && std::abs(a) > qa) {
        qa = std::abs(a);
        q = j;
      }
    }
    if (q < 0) return Status::NumericalFailure;

    ftran(q, alpha_col);
    const double arq = alpha_row[q];
    if (std::abs(alpha_col[r] - arq) > 1e-7 * std::max(1.0, std::abs(arq))) {
      if (since_refresh_ == 0 && retried) return Status::NumericalFailure;
      retried = true;
      if (!reinvert()) return Status::NumericalFailure;
      continue;
    }
    retried = false;

    double theta_d = d_[q] / arq;
    if (sign * theta_d < 0.0) theta_d = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      const std::uint8_t s = state_[j];
      if (s == kBasic || s == kFixed) continue;
      d_[j] -= theta_d * alpha_row[j];
    }

    const double target = to_upper ? hi_[leaving] : lo_[leaving];
    const double theta_p = (x_[leaving] - target) / alpha_col[r];
    for (int i = 0; i < m_; ++i) {
      if (alpha_col[i] != 0.0) x_[head_[i]] -= theta_p * alpha_col[i];
    }
    x_[q] += theta_p;
    x_[leaving] = target;
    apply_pivot(r, q, alpha_col);
    d_[leaving] = -theta_d;
    state_[leaving] = lo_[leaving] == hi_[leaving] ? kFixed : (to_upper ? kUpper : kLower);
    ++stats_.dual_iterations;
    fix_dual_infeasibilities(dtol);
  }
}

Status Simplex::primal_phase() {
  const double dtol = options_.dual_tolerance;
  const double ptol = options_.pivot_tolerance;
  const double ftol = options_.primal_tolerance;
  std::vector<double> alpha_row;
  std::vector<double> alpha_col;
  while (true) {
    if (!iteration_budget_left()) return Status::IterationLimit;
    if (since_refresh_ >= options_.refresh_interval) refresh();

    int q = -1;
    double best = dtol;
    for (int j = 0; j < n_ + m_; ++j) {
      const std::uint8_t s = state_[j];
      double v = 0.0;
      if (s == kLower && d_[j] < 0.0) v = -d_[j];
      if (s == kUpper && d_[j] > 0.0) v = d_[j];
      if (s == kZero) v = std::abs(d_[j]);
      if (v > best) {
        best = v;
        q = j;
      }
    }
    if (q < 0) return Status::Optimal;
    const double dir = (state_[q] == kLower || (state_[q] == kZero && d_[q] < 0.0)) ? 1.0 : -1.0;
    ftran(q, alpha_col);

    double amax = 0.0;
    for (double a : alpha_col) amax = std::max(amax, std::abs(a));
    const double atol = ptol * std::max(1.0, amax);

    double theta_max = lp::kInf;
    for (int i = 0; i < m_; ++i) {
      const double g = -dir * alpha_col[i];
      const int j = head_[i];
      if (g < -atol && finite(lo_[j])) {
        theta_max = std::min(theta_max, (x_[j] - lo_[j] + ftol) / -g);
      } else if (g > atol && finite(hi_[j])) {
        theta_max = std::min(theta_max, (hi_[j] + ftol - x_[j]) / g);
      }
    }
    const double range = hi_[q] - lo_[q];
    if (!(theta_max < lp::kInf) && !finite(range)) return Status::Unbounded;

    int r = -1;
    double ra = 0.0;
    double step = 0.0;
    bool r_to_upper = false;
    for (int i = 0; i < m_; ++i) {
      const double g = -dir * alpha_col[i];
      const int j = head_[i];
      double ratio;
      bool up;
      if (g < -atol && finite(lo_[j])) {
        ratio = (x_[j] - lo_[j]) / -g;
        up = false;
      } else if (g > atol && finite(hi_[j])) {
        ratio = (hi_[j] - x_[j]) / g;
        up = true;
      } else {
        continue;
      }
      if (ratio <= theta_max && std::abs(g) > ra) {
        ra = std::abs(g);
        r = i;
        step = std::max(0.0, ratio);
        r_to_upper = up;
      }
    }

    if (r < 0 || range <= step) {
      // Entering variable reaches its opposite bound first.
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= dir * range * alpha_col[i];
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      state_[q] = dir > 0 ? kUpper : kLower;
      ++stats_.bound_flips;
      ++stats_.primal_iterations;
      continue;
    }

    pivot_row(r, alpha_row);
    const double arq = alpha_row[q];
    if (std::abs(alpha_col[r] - arq) > 1e-7 * std::max(1.0, std::abs(arq))) {
      if (!reinvert()) return Status::NumericalFailure;
      continue;
    }
    const double theta_d = d_[q] / arq;
    for (int j = 0; j < n_ + m_; ++j) {
      const std::uint8_t s = state_[j];
      if (s == kBasic || s == kFixed) continue;
      d_[j] -= theta_d * alpha_row[j];
    }
    const int leaving = head_[r];
    for (int i = 0; i < m_; ++i) {
      if (alpha_col[i] != 0.0) x_[head_[i]] -= dir * step * alpha_col[i];
    }
    x_[q] += dir * step;
    x_[leaving] = r_to_upper ? hi_[leaving] : lo_[leaving];
    apply_pivot(r, q, alpha_col);
    d_[leaving] = -theta_d;
    state_[leaving] = lo_[leaving] == hi_[leaving] ? kFixed : (r_to_upper ? kUpper : kLower);
    ++stats_.primal_iterations;
  }
}

Status Simplex::solve() {
  if (!has_basis_) {
    init_slack_basis();
  } else {
    refresh();
  }
  for (int round = 0; round < 50; ++round) {
    Status s = dual_phase();
    if (s != Status::Optimal) return status_ = s;
    refresh();
    if (fix_dual_infeasibilities(options_.dual_tolerance) > 0) continue;
    if (max_primal_infeasibility() > options_.primal_tolerance) continue;
    if (max_dual_infeasibility() > options_.dual_tolerance) {
      s = primal_phase();
      if (s != Status::Optimal) return status_ = s;
      refresh();
      if (max_primal_infeasibility() > options_.primal_tolerance) continue;
    }
    // Residual check against the original rows guards the explicit inverse.
    const std::vector<double> act = model_.row_activity(std::span<const double>(x_.data(), n_));
    double resid = 0.0;
    for (int i = 0; i < m_; ++i) {
      resid = std::max(resid, std::abs(act[i] + x_[n_ + i]) / (1.0 + std::abs(act[i])));
    }
    if (resid > 1e-9) {
      if (!reinvert()) return status_ = Status::NumericalFailure;
      continue;
    }
    for (int j = 0; j < n_ + m_; ++j) {
      if (!boxed_artificially_[j]) continue;
      const double l = j < n_ ? model_.column_lower(j) : -model_.row_upper(j - n_);
      const double u = j < n_ ? model_.column_upper(j) : -model_.row_lower(j - n_);
      if ((!finite(u) && x_[j] > hi_[j] - 1.0) || (!finite(l) && x_[j] < lo_[j] + 1.0)) {
        return status_ = Status::Unbounded;
      }
    }
    return status_ = Status::Optimal;
  }
  return status_ = Status::NumericalFailure;
}

void Simplex::set_column_bounds(int col, double lower, double upper) {
  model_.set_column_bounds(col, lower, upper);
  lo_[col] = lower;
  hi_[col] = upper;
  boxed_artificially_[col] = 0;
  status_ = Status::NotSolved;
  if (!has_basis_ || state_[col] == kBasic) return;
  const double old = x_[col];
  const std::uint8_t s = state_[col];
  if (lower == upper) {
    state_[col] = kFixed;
    x_[col] = lower;
  } else if (s == kLower && finite(lower)) {
    x_[col] = lower;
  } else if (s == kUpper && finite(upper)) {
    x_[col] = upper;
  } else {
    place_nonbasic(col);
  }
  const double move = x_[col] - old;
  if (move != 0.0) {
    std::vector<double> delta(m_, 0.0);
    const ColumnView c = column(col);
    for (int k = 0; k < c.size; ++k) delta[c.rows[k]] -= c.values[k] * move;
    shift_primal(delta);
  }
}

double Simplex::objective() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += model_.cost(j) * x_[j];
  return s;
}

std::vector<double> Simplex::column_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

double Simplex::row_dual(int row) const { return y_[row] / obj_scale_; }

double Simplex::reduced_cost(int col) const { return d_[col] / obj_scale_; }

double Simplex::parametric_limit(int col, double direction) const {
  if (state_[col] == kBasic) return 0.0;
  std::vector<double> alpha;
  ftran(col, alpha);
  double t = lp::kInf;
  for (int i = 0; i < m_; ++i) {
    const double g = -direction * alpha[i];
    const int j = head_[i];
    if (g < -1e-12 && finite(lo_[j])) {
      t = std::min(t, std::max(0.0, (x_[j] - lo_[j]) / -g));
    } else if (g > 1e-12 && finite(hi_[j])) {
      t = std::min(t, std::max(0.0, (hi_[j] - x_[j]) / g));
    }
  }
  return t;
}

double Simplex::max_primal_infeasibility() const {
  double worst = 0.0;
  for (int j = 0; j < n_ + m_; ++j) {
    worst = std::max({worst, lo_[j] - x_[j], x_[j] - hi_[j]});
  }
  return worst;
}

double Simplex::max_dual_infeasibility() const {
  double worst = 0.0;
  for (int j = 0; j < n_ + m_; ++j) {
    const std::uint8_t s = state_[j];
    if (s == kLower) worst = std::max(worst, -d_[j]);
    if (s == kUpper) worst = std::max(worst, d_[j]);
    if (s == kZero) worst = std::max(worst, std::abs(d_[j]));
  }
  return worst;
}

std::string Simplex::diagnostics() const {
  std::ostringstream os;
  os << "status=" << to_string(status_) << " rows=" << m_ << " cols=" << n_
     << " dual_iter=" << stats_.dual_iterations << " primal_iter=" << stats_.primal_iterations
     << " flips=" << stats_.bound_flips << " reinversions=" << stats_.reinversions
     << " primal_inf=" << max_primal_infeasibility()
     << " dual_inf=" << max_dual_infeasibility() / obj_scale_;
  return os.str();
}

}  // namespace ldes::lp
