#include "ldes/lp/model.hpp"

#include <stdexcept>

namespace ldes::lp {

int Model::add_column(double cost, double lower, double upper, std::string name) {
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  cost_.push_back(cost);
  col_lower_.push_back(lower);
  col_upper_.push_back(upper);
  col_names_.push_back(std::move(name));
  columns_.emplace_back();
  return num_columns() - 1;
}

int Model::add_row(double lower, double upper, std::string name) {
  if (lower > upper) throw std::invalid_argument("row lower bound exceeds upper bound");
  row_lower_.push_back(lower);
  row_upper_.push_back(upper);
  row_names_.push_back(std::move(name));
  return num_rows() - 1;
}

void Model::add_coefficient(int row, int col, double value) {
  if (row < 0 || row >= num_rows() || col < 0 || col >= num_columns()) {
    throw std::out_of_range("coefficient index out of range");
  }
  if (value == 0.0) return;
  auto& c = columns_[col];
  for (auto it = c.begin(); it != c.end(); ++it) {
    if (it->index == row) {
      it->value += value;
      if (it->value == 0.0) c.erase(it);
      return;
    }
  }
  c.push_back({row, value});
}

void Model::set_column_bounds(int col, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  col_lower_.at(col) = lower;
  col_upper_.at(col) = upper;
}

void Model::set_row_bounds(int row, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("row lower bound exceeds upper bound");
  row_lower_.at(row) = lower;
  row_upper_.at(row) = upper;
}

void Model::set_cost(int col, double cost) { cost_.at(col) = cost; }

std::size_t Model::num_nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.size();
  return n;
}

std::vector<double> Model::row_activity(std::span<const double> x) const {
  std::vector<double> act(row_lower_.size(), 0.0);
  for (int j = 0; j < num_columns(); ++j) {
    for (const auto& e : columns_[j]) act[e.index] += e.value * x[j];
  }
  return act;
}

}  // namespace ldes::lp
