#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lgd {

/// Shapes of two operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration or hyperparameter values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; the message carries the location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Langevin or gradient-descent iterate became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step, double step_size)
      : std::runtime_error("iterate became non-finite at step " + std::to_string(step) +
                           " (step size " + std::to_string(step_size) + ")"),
        step_(step),
        step_size_(step_size) {}

  std::int64_t step() const { return step_; }
  double step_size() const { return step_size_; }

 private:
  std::int64_t step_;
  double step_size_;
};

/// Numerical routine could not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DimensionError("<what>: expected <expected>, got <actual>") on mismatch.
void require_dim(const char* what, long expected, long actual);

}  // namespace lgd
