#include "ldes/lp/lp_format.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ldes::lp {
namespace {

std::string col_name(const Model& m, int j) {
  return m.column_name(j).empty() ? "x" + std::to_string(j) : m.column_name(j);
}

std::string row_name(const Model& m, int i) {
  return m.row_name(i).empty() ? "r" + std::to_string(i) : m.row_name(i);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void term(std::ostream& os, double v, const std::string& name, bool first) {
  if (v < 0) {
    os << " - " << -v << ' ' << name;
  } else {
    os << (first ? " " : " + ") << v << ' ' << name;
  }
}

}  // namespace

void write_lp_format(const Model& model, std::ostream& os) {
  const auto old_precision = os.precision(17);
  os << "\\ generated by ldes-contracts\nMinimize\n obj:";
  bool first = true;
  for (int j = 0; j < model.num_columns(); ++j) {
    if (model.cost(j) == 0.0) continue;
    term(os, model.cost(j), col_name(model, j), first);
    first = false;
  }
  if (first) os << " 0 " << col_name(model, 0);
  os << "\nSubject To\n";

  std::vector<std::vector<Entry>> rows(model.num_rows());
  for (int j = 0; j < model.num_columns(); ++j) {
    for (const auto& e : model.column(j)) rows[e.index].push_back({j, e.value});
  }
  for (int i = 0; i < model.num_rows(); ++i) {
    const double lo = model.row_lower(i);
    const double hi = model.row_upper(i);
    auto body = [&](std::ostream& o) {
      bool f = true;
      for (const auto& e : rows[i]) {
        term(o, e.value, col_name(model, e.index), f);
        f = false;
      }
      if (f) o << " 0 " << col_name(model, 0);
    };
    if (lo == hi) {
      os << ' ' << row_name(model, i) << ':';
      body(os);
      os << " = " << lo << '\n';
      continue;
    }
    if (std::isfinite(lo)) {
      os << ' ' << row_name(model, i) << (std::isfinite(hi) ? "_lo:" : ":");
      body(os);
      os << " >= " << lo << '\n';
    }
    if (std::isfinite(hi)) {
      os << ' ' << row_name(model, i) << (std::isfinite(lo) ? "_hi:" : ":");
      body(os);
      os << " <= " << hi << '\n';
    }
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_columns(); ++j) {
    const double lo = model.column_lower(j);
    const double hi = model.column_upper(j);
    const std::string n = col_name(model, j);
    if (lo == hi) {
      os << ' ' << n << " = " << lo << '\n';
    } else if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << ' ' << n << " free\n";
    } else {
      os << ' ' << (std::isfinite(lo) ? num(lo) : std::string("-inf")) << " <= " << n
         << " <= " << (std::isfinite(hi) ? num(hi) : std::string("+inf")) << '\n';
    }
  }
  os << "End\n";
  os.precision(old_precision);
}

}  // namespace ldes::lp
