#pragma once

#include <optional>
#include <vector>

#include "fracspde/common.hpp"

namespace fracspde {

// Two-parameter Mittag-Leffler function
//
//   E_{alpha,beta}(z) = sum_{k>=0} z^k / Gamma(alpha k + beta),
//
// for 0 < alpha <= 2 and real beta.
struct MlfParams {
  double alpha = 1.0;
  double beta = 1.0;
};

void validate(const MlfParams &p);

// Evaluator bound to one (alpha, beta). Construction precomputes the series
// coefficients, the asymptotic coefficients and the Hankel-contour nodes, so
// repeated evaluation (kernel tables) costs a few dozen complex operations.
//
// Route selection for operator():
//   |z| <= 1                       power series
//   z = -x, x > 1e8, alpha < 1     asymptotic expansion when it converges to
//                                  full precision
//   otherwise                      trapezoidal rule on a hyperbolic Hankel
//                                  contour, with the poles of the integrand
//                                  subtracted and their residues added back
//
// Immutable after construction; safe to share between threads.
class MittagLeffler {
 public:
  explicit MittagLeffler(MlfParams p);

  const MlfParams &params() const { return p_; }

  Complex operator()(Complex z) const;
  double operator()(double x) const;

  // t^{beta-1} E_{alpha,beta}(-lambda_s t^alpha).
  double kernel(double lambda_s, double t) const;

  // Individual evaluation routes, exposed for cross-checking.
  struct SeriesValue {
    Complex value;
    // sum |term_k| / |sum term_k|; eps * condition bounds the rounding error.
    double condition = 1.0;
  };
  SeriesValue series(Complex z) const;
  Complex contour(Complex z) const;
  // E_{alpha,beta}(-x) for x > 0 and alpha < 1. Empty when the expansion does
  // not reach double precision before its terms start to grow.
  std::optional<double> asymptotic(double x) const;

 private:
  double series_small(double x) const;
  double contour_real(double x) const;

  MlfParams p_;
  std::vector<double> series_coeffs_;
  std::vector<double> asym_log_mag_;
  std::vector<int> asym_sign_;
  std::vector<double> asym_log_env_;
  // Real-axis evaluation data for nodes 0..K.
  using HalfArray = Eigen::Array<double, 33, 1>;
  HalfArray half_wr_, half_pr_, half_wipi_, half_pi2_;
};

Complex ml(const MlfParams &p, Complex z);
double ml(const MlfParams &p, double x);

// t^{beta-1} E_{alpha,beta}(-lambda_s t^alpha); t = 0 with beta < 1 throws
// SingularEvaluation.
double ml_kernel(const MlfParams &p, double lambda_s, double t);

}  // namespace fracspde
