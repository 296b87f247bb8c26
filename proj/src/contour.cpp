#include "fracspde/contour.hpp"

#include <cmath>
#include <sstream>

namespace fracspde {

void validate(const ContourParams &p) {
  if (p.L < 1) throw InvalidParameter("contour L must be at least 1");
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw InvalidParameter("contour mu must be positive");
  if (!(p.nu > 0.0) || !(p.nu < kPi / 2)) throw InvalidParameter("contour nu must lie in (0, pi/2)");
  if (!(p.q > 0.0)) throw InvalidParameter("contour q must be positive");
  if (!(p.q + p.nu < kPi / 2)) throw InvalidParameter("contour requires q + nu < pi/2");
}

ContourRule build_rule(const ContourParams &p) {
  validate(p);
  ContourRule rule;
  rule.params = p;
  rule.step = std::sqrt(2.0 * kPi * p.q / static_cast<double>(p.L));
  const Index n = 2 * p.L + 1;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double c = rule.step * p.mu / (2.0 * kPi);
  for (Index j = 0; j <= p.L; ++j) {
    const Complex arg(p.nu, j * rule.step);
    const Complex z = p.mu * (1.0 - std::sin(arg));
    const Complex w = c * std::cos(arg);
    rule.nodes(p.L + j) = z;
    rule.weights(p.L + j) = w;
    // Mirror image so that z_{-j} == conj(z_j) holds bitwise.
    rule.nodes(p.L - j) = std::conj(z);
    rule.weights(p.L - j) = std::conj(w);
  }
  // Off the real axis the nodes never touch the branch cut of z^alpha.
  for (Index j = 1; j <= p.L; ++j) {
    if (!(rule.node(j).imag() < 0.0)) throw NumericalError("contour node crossed the branch cut");
  }
  return rule;
}

namespace {

Complex term(const ContourRule &rule, Index j, double alpha, double lambda_s, double t) {
  const Complex z = rule.node(j);
  const Complex za = std::pow(z, alpha);
  return rule.weight(j) * std::exp(z * t) * (za / (z * z)) / (za + lambda_s);
}

void check_args(double alpha, double lambda_s, double t) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) throw InvalidParameter("kernel alpha must lie in (0,1]");
  if (!(lambda_s >= 0.0) || !std::isfinite(lambda_s)) throw InvalidParameter("kernel eigenvalue must be nonnegative");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("kernel time must be nonnegative");
}

}  // namespace

double kernel_weights(const ContourRule &rule, double alpha, double lambda_s, double t) {
  check_args(alpha, lambda_s, t);
  if (t == 0.0) return 0.0;
  double acc = term(rule, 0, alpha, lambda_s, t).real();
  for (Index j = 1; j <= rule.half(); ++j) acc += 2.0 * term(rule, j, alpha, lambda_s, t).real();
  return acc;
}

Complex kernel_sum(const ContourRule &rule, double alpha, double lambda_s, double t) {
  check_args(alpha, lambda_s, t);
  if (t == 0.0) return 0.0;
  Complex acc = 0.0;
  for (Index j = -rule.half(); j <= rule.half(); ++j) acc += term(rule, j, alpha, lambda_s, t);
  return acc;
}

double error_bound(const ContourParams &p) {
  return std::exp(-std::sqrt(2.0 * kPi * p.q * static_cast<double>(p.L)));
}

void check_horizon(const ContourParams &p, double horizon) {
  if (p.mu * horizon > 30.0) {
    std::ostringstream os;
    os << "contour scale mu=" << p.mu << " with horizon " << horizon
       << " gives mu*T > 30; e^{z_0 t} may lose accuracy";
    warn(os.str());
  }
}

}  // namespace fracspde
