#pragma once

#include <stdexcept>
#include <string>

namespace ldes {

// Malformed input text (config file, profile table, CLI values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named invariant of the data model does not hold. field() is a dotted
// path such as "scenarios.probability" or "technologies[ldes].cap_fixed".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Solver or search failure: LP status other than optimal, no bracketing
// parameter range, non-monotone calibration response.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldes
