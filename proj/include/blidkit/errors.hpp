#pragma once

#include <stdexcept>
#include <string>

namespace blidkit {

/// Invalid parameters or scenario contents. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed something structurally wrong (e.g. dimension mismatch).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear part has an eigenvalue on (or too close to) the unit circle.
class NonHyperbolicError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// An iterative method did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// All fitted radii sit below the noise floor, so no slope can be estimated.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blidkit
