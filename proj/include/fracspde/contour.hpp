#pragma once

#include "fracspde/common.hpp"

namespace fracspde {

// Hyperbolic contour rho(r) = mu (1 - sin(nu + i r)) and its truncated
// trapezoidal (sinc) rule with 2L+1 nodes z_j = rho(j h), h = sqrt(2 pi q / L).
struct ContourParams {
  Index L = 200;
  double mu = 7.0;
  double nu = 0.1 * kPi;
  double q = 0.05 * kPi;
};

void validate(const ContourParams &p);

struct ContourRule {
  ContourParams params;
  // Entry j + L holds node j, j = -L..L.
  ComplexVector nodes;
  // omega_j = -h/(2 pi i) rho'(j h) = (h mu / 2 pi) cos(nu + i j h)
  ComplexVector weights;
  double step = 0.0;

  Index half() const { return params.L; }
  Complex node(Index j) const { return nodes(j + params.L); }
  Complex weight(Index j) const { return weights(j + params.L); }
};

ContourRule build_rule(const ContourParams &p);

// Re sum_j omega_j e^{z_j t} z_j^{alpha-2} / (z_j^alpha + lambda_s), which
// approximates t E_{alpha,2}(-lambda_s t^alpha). Zero at t = 0 by convention:
// the quadrature does not converge there and the target integral vanishes.
double kernel_weights(const ContourRule &rule, double alpha, double lambda_s, double t);

// The same quadrature over all 2L+1 nodes without taking the real part.
Complex kernel_sum(const ContourRule &rule, double alpha, double lambda_s, double t);

// e^{-sqrt(2 pi q L)}: quadrature error scale with unit constant.
double error_bound(const ContourParams &p);

// e^{z_0 t} grows like e^{mu t}; warns when mu * horizon > 30.
void check_horizon(const ContourParams &p, double horizon);

}  // namespace fracspde
