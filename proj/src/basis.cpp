#include "fracspde/basis.hpp"

#include <cmath>
#include <string>

namespace fracspde {

double Eigenpair::operator()(double x) const {
  return std::numbers::sqrt2 * std::sin(static_cast<double>(index) * kPi * x);
}

Eigenpair eigenpair(Index k) {
  if (k < 1) throw InvalidParameter("eigenpair index must be >= 1");
  const double kp = static_cast<double>(k) * kPi;
  return {k, kp * kp};
}

Vector eigenvalues(Index n_modes) {
  Vector v(n_modes);
  for (Index k = 0; k < n_modes; ++k) v(k) = eigenpair(k + 1).value;
  return v;
}

Vector eigenvalue_powers(Index n_modes, double s) {
  return (s * eigenvalues(n_modes).array().log()).exp().matrix();
}

double SpectralState::operator()(double x) const {
  double acc = 0.0;
  for (Index k = 0; k < coeffs.size(); ++k) acc += coeffs(k) * eigenpair(k + 1)(x);
  return acc;
}

Index min_grid_points(Index n_modes) { return 4 * n_modes + 1; }

Vector uniform_grid(Index points) {
  if (points < 2) throw ResolutionError("grid needs at least two points");
  return Vector::LinSpaced(points, 0.0, 1.0);
}

Vector simpson_weights(Index points) {
  const Index intervals = points - 1;
  if (intervals < 2 || intervals % 2 != 0) {
    throw ResolutionError("Simpson rule needs an even number of intervals, got " + std::to_string(intervals));
  }
  const double h = 1.0 / static_cast<double>(intervals);
  Vector w(points);
  for (Index i = 0; i < points; ++i) w(i) = (i % 2 == 1) ? 4.0 : 2.0;
  w(0) = w(points - 1) = 1.0;
  return w * (h / 3.0);
}

Matrix synthesis_matrix(Index n_modes, Index points) {
  const Vector x = uniform_grid(points);
  Matrix s(points, n_modes);
  for (Index k = 0; k < n_modes; ++k) {
    const Eigenpair e = eigenpair(k + 1);
    for (Index i = 0; i < points; ++i) s(i, k) = e(x(i));
  }
  // sin(k pi) is not exactly zero in floating point
  s.row(0).setZero();
  s.row(points - 1).setZero();
  return s;
}

Matrix projection_matrix(Index n_modes, Index points) {
  if (n_modes < 1) throw InvalidParameter("number of modes must be >= 1");
  if (points < min_grid_points(n_modes)) {
    throw ResolutionError("grid of " + std::to_string(points) + " points cannot resolve " +
                          std::to_string(n_modes) + " modes (need " +
                          std::to_string(min_grid_points(n_modes)) + ")");
  }
  const Vector w = simpson_weights(points);
  return synthesis_matrix(n_modes, points).transpose() * w.asDiagonal();
}

SpectralState project(const Vector &samples, Index n_modes) {
  return SpectralState(projection_matrix(n_modes, samples.size()) * samples);
}

SpectralState project(const std::function<double(double)> &u, Index n_modes, Index points) {
  if (points == 0) points = min_grid_points(n_modes);
  const Vector x = uniform_grid(points);
  Vector samples(points);
  for (Index i = 0; i < points; ++i) samples(i) = u(x(i));
  return project(samples, n_modes);
}

Vector constant_coefficients(double c, Index n_modes) {
  Vector v(n_modes);
  for (Index k = 1; k <= n_modes; ++k) {
    v(k - 1) = (k % 2 == 1) ? c * 2.0 * std::numbers::sqrt2 / (static_cast<double>(k) * kPi) : 0.0;
  }
  return v;
}

SpectralState apply_frac_laplacian(const SpectralState &state, double s, int sign) {
  if (sign != 1 && sign != -1) throw InvalidParameter("fractional power sign must be +1 or -1");
  const Vector p = eigenvalue_powers(state.n_modes(), sign * s);
  return SpectralState(state.coeffs.cwiseProduct(p));
}

}  // namespace fracspde
