#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pnpf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, parameters, stepper settings or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Poisson source with nonzero mean; the periodic problem has no solution.
class NonNeutralSource : public Error {
 public:
  explicit NonNeutralSource(double mean)
      : Error("NonNeutralSource: source mean " + std::to_string(mean) +
              " exceeds neutrality tolerance"),
        mean_(mean) {}
  double mean() const noexcept { return mean_; }

 private:
  double mean_;
};

/// A density or temperature dropped below the positivity floor.
class PositivityViolation : public Error {
 public:
  PositivityViolation(std::string field, double minimum)
      : Error("PositivityViolation: min(" + field + ") = " +
              std::to_string(minimum) + " below floor"),
        field_(std::move(field)),
        minimum_(minimum) {}
  const std::string& field() const noexcept { return field_; }
  double minimum() const noexcept { return minimum_; }

 private:
  std::string field_;
  double minimum_;
};

/// Non-finite values appeared during time integration.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

/// Time step exceeds the explicit stability estimate.
class StabilityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pnpf
