#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace daelab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

/// Condition number above which λE−A is treated as singular in double precision.
inline constexpr double kSingularConditionThreshold = 1e12;

enum class ErrorCode {
  DimensionMismatch,
  NotInResolventSet,
  NotRegular,
  InconsistentInitialValue,
  ValidationFailed,
  QSingular,
  InvalidConfig,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NotInResolventSet: return "NOT_IN_RESOLVENT_SET";
    case ErrorCode::NotRegular: return "NOT_REGULAR";
    case ErrorCode::InconsistentInitialValue: return "INCONSISTENT_INITIAL_VALUE";
    case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
    case ErrorCode::QSingular: return "Q_SINGULAR";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a sampled λ is not in the resolvent set; keeps the offending point.
class NotInResolventSetError : public Error {
 public:
  NotInResolventSetError(Complex lambda, double condition, const std::string& what)
      : Error(ErrorCode::NotInResolventSet, what), lambda_(lambda), condition_(condition) {}

  Complex lambda() const noexcept { return lambda_; }
  double condition() const noexcept { return condition_; }

 private:
  Complex lambda_;
  double condition_;
};

namespace detail {

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace detail

}  // namespace daelab
