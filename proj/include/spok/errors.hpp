#ifndef SPOK_ERRORS_HPP
#define SPOK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spok {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Argument inside the domain but outside the contracted evaluation window.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& msg) : Error(msg) {}
};

/// A series, quadrature, root search or rejection loop failed to converge
/// within its iteration budget.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// Result (or an unavoidable intermediate) exceeds double range.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& msg) : Error(msg) {}
};

/// A theorem hypothesis required by the requested computation is violated
/// (e.g. a subordinator family without finite moments of all orders).
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& msg) : Error(msg) {}
};

}  // namespace spok

#endif  // SPOK_ERRORS_HPP
