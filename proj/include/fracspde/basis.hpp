#pragma once

#include <functional>

#include "fracspde/common.hpp"

namespace fracspde {

// Dirichlet eigensystem of -d^2/dx^2 on (0,1):
// lambda_k = (k pi)^2, phi_k(x) = sqrt(2) sin(k pi x), k >= 1.
struct Eigenpair {
  Index index = 1;
  double value = kPi * kPi;

  double operator()(double x) const;
};

Eigenpair eigenpair(Index k);

// lambda_1 .. lambda_N
Vector eigenvalues(Index n_modes);

// lambda_k^s for k = 1..N, via exp(s ln lambda_k).
Vector eigenvalue_powers(Index n_modes, double s);

// Coefficients of sum_k c_k phi_k; orthonormality makes the coefficient norm
// the L2 norm.
struct SpectralState {
  Vector coeffs;

  SpectralState() = default;
  explicit SpectralState(Index n_modes) : coeffs(Vector::Zero(n_modes)) {}
  explicit SpectralState(Vector c) : coeffs(std::move(c)) {}

  Index n_modes() const { return coeffs.size(); }
  double l2_norm() const { return coeffs.norm(); }
  double operator()(double x) const;
};

// Raised when a sample grid cannot resolve N modes.
struct ResolutionError : ConfigurationError {
  using ConfigurationError::ConfigurationError;
};

// Smallest admissible grid for N modes: 4N+1 points including both endpoints.
Index min_grid_points(Index n_modes);

// x_i = i/(points-1), i = 0..points-1
Vector uniform_grid(Index points);

// Composite Simpson weights on the uniform grid; needs an even number of
// intervals.
Vector simpson_weights(Index points);

// (points x N) matrix with entries phi_k(x_i).
Matrix synthesis_matrix(Index n_modes, Index points);

// (N x points) matrix mapping grid samples to Simpson inner products
// (u, phi_k). Exact on span{phi_1..phi_N} for points >= 4N+1.
Matrix projection_matrix(Index n_modes, Index points);

// P_N u from samples on a uniform grid with both endpoints.
SpectralState project(const Vector &samples, Index n_modes);
SpectralState project(const std::function<double(double)> &u, Index n_modes, Index points = 0);

// Exact (c, phi_k) = c sqrt(2) (1 - (-1)^k) / (k pi).
Vector constant_coefficients(double c, Index n_modes);

// Multiply coefficient k by lambda_k^{sign * s}; sign must be +1 or -1.
SpectralState apply_frac_laplacian(const SpectralState &state, double s, int sign = 1);

}  // namespace fracspde
