#pragma once

#include <stdexcept>
#include <string>

namespace potlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad scene, bad parameters, bad file).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A point where a field is undefined (inside the compact set, on a node).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The equilibrium solver failed to converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, long iterations)
      : Error(what + " (residual " + std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// Level-curve tracing broke down, usually next to a critical point.
class TracerError : public Error {
 public:
  TracerError(const std::string& what, double level, double nearby_value)
      : Error(what + " (level " + std::to_string(level) +
              ", nearby critical value ~" + std::to_string(nearby_value) + ")"),
        level_(level),
        nearby_value_(nearby_value) {}

  double level() const noexcept { return level_; }
  double nearby_value() const noexcept { return nearby_value_; }

 private:
  double level_;
  double nearby_value_;
};

}  // namespace potlab
