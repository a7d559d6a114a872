#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ldes::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  int index;
  double value;
};

// Linear program in bounded form:
//   minimize    c'x
//   subject to  row_lower <= A x <= row_upper
//               col_lower <=  x  <= col_upper
// A is stored column-wise.
class Model {
 public:
  int add_column(double cost, double lower, double upper, std::string name = {});
  int add_row(double lower, double upper, std::string name = {});
  void add_coefficient(int row, int col, double value);

  void set_column_bounds(int col, double lower, double upper);
  void set_row_bounds(int row, double lower, double upper);
  void set_cost(int col, double cost);

  int num_rows() const { return static_cast<int>(row_lower_.size()); }
  int num_columns() const { return static_cast<int>(cost_.size()); }
  std::size_t num_nonzeros() const;

  std::span<const Entry> column(int col) const { return columns_[col]; }
  double cost(int col) const { return cost_[col]; }
  double column_lower(int col) const { return col_lower_[col]; }
  double column_upper(int col) const { return col_upper_[col]; }
  double row_lower(int row) const { return row_lower_[row]; }
  double row_upper(int row) const { return row_upper_[row]; }
  const std::string& column_name(int col) const { return col_names_[col]; }
  const std::string& row_name(int row) const { return row_names_[row]; }

  // Row activities A x for a full column vector.
  std::vector<double> row_activity(std::span<const double> x) const;

 private:
  std::vector<double> cost_, col_lower_, col_upper_;
  std::vector<double> row_lower_, row_upper_;
  std::vector<std::string> col_names_, row_names_;
  std::vector<std::vector<Entry>> columns_;
};

}  // namespace ldes::lp
