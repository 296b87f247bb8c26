#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fracspde/scheme.hpp"

namespace fracspde {

enum class Mode { spatial, temporal, timing, single };
std::string to_string(Mode m);
Mode mode_from_string(const std::string &s);

struct ExperimentConfig {
  ModelParams model;  // N (temporal) or M (spatial) is held fixed
  ContourParams contour;
  Mode mode = Mode::temporal;
  Variant variant = Variant::fast;
  Index samples = 100;
  // Coarse resolutions; each is compared with its double, so the finest
  // solve runs at 2 * ladder.back().
  std::vector<Index> ladder;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  Index fine_grid = 0;  // spatial covariance grid, 0 for the default
};

// Checks the model and the ladder (nonempty, each entry twice the previous).
void validate(const ExperimentConfig &cfg);

// Covariance factors for one (N, M) noise shape, shared read-only by all
// paths of an experiment.
struct NoiseFactory {
  SpatialProjCov spatial;
  TimeIncrementCov temporal;

  NoiseSample draw(std::uint64_t master_seed, std::uint64_t path) const;
};
NoiseFactory make_noise_factory(const HurstPair &h, Index n_modes, Index steps, double horizon, Index fine_grid = 0);

// Shape of the single noise path every level of an experiment is cut from.
struct NoiseShape {
  Index n_modes = 0;
  Index steps = 0;
};
NoiseShape finest_noise(const ExperimentConfig &cfg);

// Squared L2 differences ||u_r(T) - u_{2r}(T)||^2 for every ladder entry r,
// on one noise path. Temporal levels see coarsen_time of the path, spatial
// levels truncate_modes; the coarser state is zero-padded in space.
std::vector<double> path_differences(const ExperimentConfig &cfg, const NoiseSample &finest, const ContourRule &rule);

struct ErrorRow {
  Index resolution = 0;
  double error = 0.0;
  double std_error = 0.0;  // delta-method standard error of the RMS estimate
  double rate = 0.0;     // against the previous row; NaN for the first row
};

struct ErrorTable {
  Mode mode = Mode::temporal;
  std::vector<ErrorRow> rows;
  double mean_rate = 0.0;  // NaN when any error vanishes
  double theoretical = 0.0;
  bool rates_defined() const;
};

// Rows from per-path squared differences (paths x levels), reduced in
// ascending path order.
ErrorTable tabulate(Mode mode, const std::vector<Index> &ladder, const Matrix &d2, double theoretical);

// ln(e_a / e_b) / ln 2; NaN unless both errors are positive.
double pairwise_rate(double e_a, double e_b);

ErrorTable temporal_convergence(const ExperimentConfig &cfg);
ErrorTable spatial_convergence(const ExperimentConfig &cfg);
ErrorTable convergence(const ExperimentConfig &cfg);

struct TimingRow {
  Index M = 0;
  double classical_seconds = 0.0;
  double fast_seconds = 0.0;
};

struct TimingTable {
  std::vector<TimingRow> rows;
  // least-squares slopes of log(seconds) against log(M)
  double classical_slope = 0.0;
  double fast_slope = 0.0;
};

// Wall-clock of both solvers on one sampled path per M (ladder entries used
// as they are), single-threaded; each time is the best of a few repeats.
TimingTable timing_compare(const ExperimentConfig &cfg);

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

// One trajectory on the path of index 0.
SchemeTrajectory single_run(const ExperimentConfig &cfg);

void write_errors_csv(const ErrorTable &t, std::ostream &os);
void write_rates_csv(const ErrorTable &t, std::ostream &os);
void write_timing_csv(const TimingTable &t, std::ostream &os);
// Plain "x y" series for plotting.
void write_error_series(const ErrorTable &t, std::ostream &os);
void write_timing_series(const TimingTable &t, Variant v, std::ostream &os);

}  // namespace fracspde
