#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bolab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad length, non-finite value, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Finite-difference step was non-positive or produced a singular Jacobian.
class DegenerateStepError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Raised when importance weights collapse onto too few samples.
class DegenerateWeightsError : public Error {
 public:
  DegenerateWeightsError(const std::string& what, double ess)
      : Error(what), effective_sample_size(ess) {}
  double effective_sample_size;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration text failed validation. Carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace bolab
