#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sparsereg {

// Input violates a shape/dimension precondition.
class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is not defined for this configuration (activation kind, output
// dimension, meaning tag, ...).
class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed document, config, or data file. Carries the offending field path
// when known so callers can point at the exact field.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what, std::string field_path = {})
      : std::runtime_error(field_path.empty() ? what : what + " (at " + field_path + ")"),
        field_path_(std::move(field_path)) {}
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

// Training objective blew past the guard value; names the step size in use.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& what, double step_size)
      : std::runtime_error(what + " (step size " + std::to_string(step_size) + ")"),
        step_size_(step_size) {}
  double step_size() const noexcept { return step_size_; }

 private:
  double step_size_;
};

// Iterative solver ran out of sweeps; carries the certified duality gap.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double duality_gap)
      : std::runtime_error(what + " (duality gap " + std::to_string(duality_gap) + ")"),
        duality_gap_(duality_gap) {}
  double duality_gap() const noexcept { return duality_gap_; }

 private:
  double duality_gap_;
};

// Quadrature/sampling grid too coarse for the requested accuracy.
class resolution_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Geometric precondition failed (e.g. hyperplane misses the window).
class geometry_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sparsereg
