#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pnopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when a caller breaks a documented precondition (dimension mismatch,
/// nonpositive step, inverted box bounds, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a point lies outside the domain of a smooth oracle that cannot
/// produce a derivative there (e.g. a non positive definite precision matrix).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an optional diagnostic is not supported by an oracle.
class Unavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

inline void require_dim(Eigen::Index actual, Eigen::Index expected, const char* what) {
  if (actual != expected) {
    throw ContractViolation(std::string(what) + ": dimension mismatch (got " +
                            std::to_string(actual) + ", expected " +
                            std::to_string(expected) + ")");
  }
}

}  // namespace pnopt
