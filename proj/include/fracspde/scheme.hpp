#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "fracspde/basis.hpp"
#include "fracspde/contour.hpp"
#include "fracspde/noise.hpp"

namespace fracspde {

using ComplexMatrix = Eigen::MatrixXcd;

// Source term f(u), applied pointwise. Every handle declares a Lipschitz
// constant; constant sources are flagged so their projection is exact.
struct Source {
  std::string name = "sin";
  std::function<double(double)> f = [](double u) { return std::sin(u); };
  double lipschitz = 1.0;
  std::optional<double> constant;

  static Source sine();
  static Source constant_value(double c);
  static Source zero();
  static Source custom(std::string name, std::function<double(double)> f, double lipschitz);
  static Source by_name(const std::string &name);
};

struct ModelParams {
  double alpha = 0.5;  // time-fractional order, (0,1)
  double s = 0.5;      // spatial fractional power, (0,1)
  HurstPair hurst;
  double T = 0.1;
  Index N = 16;  // modes
  Index M = 64;  // time steps
  Source f = Source::sine();
  // P_N u_0; empty means zero initial data.
  Vector initial;

  double tau() const { return T / static_cast<double>(M); }
};

void validate(const ModelParams &p);

struct RatePair {
  double spatial = 0.0;
  double temporal = 0.0;
};

// spatial min{2 s H2/alpha + H1 - 1, H1 + 2 s - 1}; temporal
// H2 + alpha (H1 - 1)/(2 s). Non-positive values are returned as they are.
RatePair theoretical_rates(double alpha, double s, const HurstPair &h);
RatePair theoretical_rates(const ModelParams &p);

// Warns when either spatial exponent is non-positive.
void check_rate_positivity(const ModelParams &p);

// Warns when the quadrature error e^{-2 sqrt(2 pi q L)} exceeds the
// discretization budget tau^{2 + r_t} N^{-r_s - 2 + 2 H1}, with r_t, r_s the
// theoretical rates.
void check_contour_coupling(const ModelParams &p, const ContourParams &c);

enum class Variant { classical, fast };
std::string to_string(Variant v);
Variant variant_from_string(const std::string &s);

struct SchemeTrajectory {
  ModelParams params;
  Variant variant = Variant::classical;
  // Column n holds the coefficients of u^n, n = 0..M.
  Matrix states;

  SpectralState state(Index n) const { return SpectralState(Vector(states.col(n))); }
  SpectralState final_state() const { return state(states.cols() - 1); }
  double time(Index n) const { return params.tau() * static_cast<double>(n); }
};

// Mittag-Leffler Euler integrator: per mode,
//   u^n = sum_{i=1}^n W_{n-i} (f^{i-1} + X_i / tau),
//   W_m = K(t_{m+1}) - K(t_m),  K(t) = t E_{alpha,2}(-lambda^s t^alpha).
// O(M^2 N).
SchemeTrajectory solve_classical(const ModelParams &p, const NoiseSample &noise);

// Same scheme with K replaced by its contour quadrature, so the convolution
// collapses to one history recurrence per (mode, node). O(L M N).
SchemeTrajectory solve_fast(const ModelParams &p, const NoiseSample &noise, const ContourRule &rule);

SchemeTrajectory solve(const ModelParams &p, const NoiseSample &noise, Variant v, const ContourRule &rule);

// Per (mode k, node j) running sums
//   H^n_kj = e^{z_j tau} H^{n-1}_kj + a_kj s^n_k,
//   a_kj = c_j omega_j (e^{z_j tau} - 1) z_j^{alpha-2} / (z_j^alpha + lambda_k^s),
// over nodes j = 0..L only: the nodes -j carry the conjugate values, which
// c_j = 2 (j > 0) accounts for.
//
// Re sum_j H^n_kj reproduces sum_{i<=n} [K(t_{n-i+1}) - K(t_{n-i})] s^i_k
// except in the newest term, whose lower end K(0) is replaced by the
// quadrature at t = 0. That sum does not converge (e^{z_j t} gives no decay
// at t = 0) and leaves an O(1e-7) offset kappa_k = Re sum_j c_j omega_j
// z_j^{alpha-2}/(z_j^alpha + lambda_k^s). values() adds kappa_k s^n_k back,
// so every weight is a difference of converged quadratures with t >= tau.
class HistoryBank {
 public:
  HistoryBank(const ContourRule &rule, double alpha, const Vector &lambda_s, double tau);

  // Advance by one step with sources s^n (one per mode).
  void push(const Vector &source);
  // u^n_k = Re sum_j H^n_kj + kappa_k s^n_k
  Vector values() const;
  void reset();

  // (L+1) x N; row j is node j.
  ComplexMatrix history() const;
  ComplexVector decay() const;
  ComplexMatrix gains() const;
  const Vector &origin_offset() const { return kappa_; }

 private:
  // Real and imaginary parts kept apart so the update vectorizes.
  using Array = Eigen::ArrayXXd;
  Eigen::ArrayXd er_, ei_;
  Array ar_, ai_;
  Array hr_, hi_, tmp_;
  Vector kappa_;
  Vector last_;
};

// Coefficients of the exact solution for f = c, zero noise and zero
// initial data: c (1, phi_k) t E_{alpha,2}(-lambda_k^s t^alpha).
SpectralState linear_oracle(const ModelParams &p, double c, double t);

// CSV with columns n, t_n, coeff_1..coeff_N; only the final row unless
// all_steps.
void write_trajectory_csv(const SchemeTrajectory &traj, std::ostream &os, bool all_steps = false);

}  // namespace fracspde
