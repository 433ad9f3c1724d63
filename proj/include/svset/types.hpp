#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace svset {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kEpsMach = std::numeric_limits<double>::epsilon();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorClass {
  DimensionMismatch,
  EpsilonTooLarge,
  SingularE,
  EmptyAfterFilter,
  NumericalFailure,
  PoleProximity,
  ParseError,
  IoError,
  BadArguments,
};

/// Maps an error class to its stable machine-readable slug (used by the CLI).
const char* error_slug(ErrorClass c);

class SvsError : public std::runtime_error {
 public:
  SvsError(ErrorClass code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorClass code() const { return code_; }
  const char* slug() const { return error_slug(code_); }

 private:
  ErrorClass code_;
};

}  // namespace svset
