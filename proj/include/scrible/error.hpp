#ifndef SCRIBLE_ERROR_HPP
#define SCRIBLE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace scrible {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point outside the region where an operation is defined (exterior, boundary).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Calls made out of order on a stateful object (learner, black-box adversary).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A runtime check of a guaranteed property failed; indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace scrible

#endif  // SCRIBLE_ERROR_HPP
