#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "fracspde/common.hpp"

namespace fracspde {

// Hurst indices of the sheet: h1 in space, h2 in time, both in (0, 1/2].
struct HurstPair {
  double h1 = 0.5;
  double h2 = 0.5;
};

void validate(const HurstPair &h);

// Lower Cholesky factor of a symmetric PSD matrix. On failure adds
// 1e-12 * trace / n to the diagonal and retries up to three times, scaling the
// jitter by 10 each time; then throws CovarianceDegenerate.
Matrix cholesky_with_jitter(const Matrix &a);

// Covariance of the fBm increments over I_i = (t_{i-1}, t_i] on a uniform
// grid of M steps:
//   C_im = tau^{2H} (|d+1|^{2H} + |d-1|^{2H} - 2|d|^{2H}) / 2,  d = i - m.
// For h2 = 1/2 this is tau I; the dense matrix is then not stored.
struct TimeIncrementCov {
  double h2 = 0.5;
  Index steps = 0;
  double tau = 0.0;
  bool white = false;
  Matrix matrix;  // empty when white
  Matrix chol;    // empty when white

  double entry(Index i, Index m) const;
  Matrix dense() const;
};

TimeIncrementCov time_increment_cov(double h2, Index steps, double horizon);

// Covariance of the projected spatial noise, Q_jk = v_j^T C_f v_k, with C_f the
// increment covariance of W^{h1} on fine_grid cells of (0,1) and v_j the
// midpoint values of phi_j.
struct SpatialProjCov {
  double h1 = 0.5;
  Index fine_grid = 0;
  Matrix matrix;
  Matrix chol;
};

// Smallest fine grid accepted for N modes is 64 N; the default is the larger
// of 2^12 and 64 N.
Index default_fine_grid(Index n_modes);
SpatialProjCov spatial_proj_cov(double h1, Index n_modes, Index fine_grid = 0);

// X(k, i) = int_{I_i} int_D phi_k xi dy dr, k < N (rows), i < M (columns).
struct NoiseSample {
  Matrix x;
  double tau = 0.0;
  HurstPair hurst;
  std::uint64_t seed = 0;

  Index n_modes() const { return x.rows(); }
  Index steps() const { return x.cols(); }
  double horizon() const { return tau * static_cast<double>(x.cols()); }
};

using Rng = std::mt19937_64;

// Independent stream for path `index` under `master_seed`; seeded through
// std::seed_seq so streams do not depend on scheduling.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index);

// X = Lq Z Lc^T with Z standard normal, filled row by row from rng.
NoiseSample sample_noise(const SpatialProjCov &q, const TimeIncrementCov &c, Rng &rng);

NoiseSample zero_noise(Index n_modes, Index steps, double horizon);

// Sums `factor` consecutive columns; the result is the noise of the coarser
// time grid for the same path.
NoiseSample coarsen_time(const NoiseSample &s, Index factor);

// First n_small rows.
NoiseSample truncate_modes(const NoiseSample &s, Index n_small);

// Binary dump: N, M (u64), tau, h1, h2 (f64), seed (u64), then N*M row-major
// f64, all little-endian.
void write_noise(const NoiseSample &s, const std::filesystem::path &path);
NoiseSample read_noise(const std::filesystem::path &path);

}  // namespace fracspde
