#pragma once

#include <iosfwd>

#include "ldes/lp/model.hpp"

namespace ldes::lp {

// Writes the model in CPLEX LP text format for cross-checking with external
// solvers. Unnamed rows and columns are written as r<i> / x<j>.
void write_lp_format(const Model& model, std::ostream& os);

}  // namespace ldes::lp
