#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace squaremap {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Failure categories double as process exit codes for the command-line tool.
enum class ErrorCategory : int {
  spec = 2,
  numeric = 3,
  property = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

/// Invalid input: malformed shapes, overlapping components, bad files.
class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what)
      : Error(ErrorCategory::spec, what) {}
};

/// A geometric precondition failed (non-simple polygon, touching closures).
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what)
      : Error(ErrorCategory::spec, what) {}
};

/// Evaluation or iteration failure: pole proximity, Newton divergence,
/// quadrature that would not converge.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCategory::numeric, what) {}
};

class PoleProximityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class MeshTooCoarseError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// An operation was invoked outside its stated domain of validity
/// (e.g. the transboundary metric on a domain that is not a square domain).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorCategory::spec, what) {}
};

/// Reduce an angle into [0, 2pi).
inline double reduce_angle(double alpha) {
  double a = std::fmod(alpha, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace squaremap
