#pragma once

#include <stdexcept>
#include <string>

namespace fastreact {

/// Invalid parameters or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Incompatible lengths or grids.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the admissible region of a map (e.g. negative concentrations).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A time integration or fixed-point iteration that blew up.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  /// Simulation time at which the failure was detected (NaN if not time-based).
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The Lyapunov-Perron splitting has no usable gap.
class DegenerateSplittingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A checked modelling assumption (gap condition) does not hold.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backward horizon too short for the requested tolerance.
class HorizonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fastreact
