#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <numbers>

#include <Eigen/Core>

namespace fracspde {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

// Error hierarchy. The CLI maps these onto exit codes:
// validation-type errors -> 1, IoError -> 2, NumericalError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParameter : Error {
  using Error::Error;
};
struct ConfigurationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct SingularEvaluation : NumericalError {
  using NumericalError::NumericalError;
};
struct CovarianceDegenerate : NumericalError {
  using NumericalError::NumericalError;
};

// Non-fatal diagnostics (rate positivity, contour coupling, overflow risk).
// The default sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(const std::string &)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string &message);

}  // namespace fracspde
