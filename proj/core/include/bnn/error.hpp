#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnn {

/// Malformed arguments to a library call (dimension mismatch, out-of-range
/// parameter, empty input where one is required).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run configuration that cannot be executed as written.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files or records that cannot be ingested.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values met during numerical work (leapfrog divergence,
/// chains entering zero-density states).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leapfrog produced a non-finite gradient at `step` (1-based).
class DivergenceError : public NumericError {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : NumericError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace bnn
