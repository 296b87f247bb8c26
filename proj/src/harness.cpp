#include "fracspde/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace fracspde {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::spatial: return "spatial";
    case Mode::temporal: return "temporal";
    case Mode::timing: return "timing";
    case Mode::single: return "single";
  }
  return "?";
}

Mode mode_from_string(const std::string &s) {
  if (s == "spatial") return Mode::spatial;
  if (s == "temporal") return Mode::temporal;
  if (s == "timing") return Mode::timing;
  if (s == "single") return Mode::single;
  throw InvalidParameter("unknown mode '" + s + "' (expected spatial, temporal, timing or single)");
}

void validate(const ExperimentConfig &cfg) {
  validate(cfg.model);
  validate(cfg.contour);
  if (cfg.samples < 1) throw InvalidParameter("samples must be >= 1");
  if (cfg.workers < 1) throw InvalidParameter("workers must be >= 1");
  if (cfg.mode == Mode::single) return;
  if (cfg.ladder.empty()) throw InvalidParameter("resolution ladder is empty");
  if (cfg.ladder.front() < 1) throw InvalidParameter("resolutions must be >= 1");
  for (std::size_t i = 1; i < cfg.ladder.size(); ++i) {
    if (cfg.ladder[i] != 2 * cfg.ladder[i - 1]) {
      throw InvalidParameter("resolution ladder must double at every step");
    }
  }
  if (cfg.mode != Mode::timing && cfg.model.initial.size() != 0) {
    throw ConfigurationError("convergence experiments run from zero initial data");
  }
}

NoiseSample NoiseFactory::draw(std::uint64_t master_seed, std::uint64_t path) const {
  Rng rng = make_stream(master_seed, path);
  NoiseSample s = sample_noise(spatial, temporal, rng);
  s.seed = master_seed;
  return s;
}

NoiseFactory make_noise_factory(const HurstPair &h, Index n_modes, Index steps, double horizon, Index fine_grid) {
  validate(h);
  return {spatial_proj_cov(h.h1, n_modes, fine_grid), time_increment_cov(h.h2, steps, horizon)};
}

NoiseShape finest_noise(const ExperimentConfig &cfg) {
  const Index top = 2 * cfg.ladder.back();
  switch (cfg.mode) {
    case Mode::temporal: return {cfg.model.N, top};
    case Mode::spatial: return {top, cfg.model.M};
    default: return {cfg.model.N, cfg.model.M};
  }
}

std::vector<double> path_differences(const ExperimentConfig &cfg, const NoiseSample &finest, const ContourRule &rule) {
  const std::size_t levels = cfg.ladder.size();
  std::vector<Vector> u(levels + 1);
  for (std::size_t i = 0; i <= levels; ++i) {
    const Index r = i < levels ? cfg.ladder[i] : 2 * cfg.ladder.back();
    ModelParams p = cfg.model;
    NoiseSample x;
    if (cfg.mode == Mode::temporal) {
      p.M = r;
      x = coarsen_time(finest, finest.steps() / r);
    } else {
      p.N = r;
      x = truncate_modes(finest, r);
    }
    u[i] = solve(p, x, cfg.variant, rule).final_state().coeffs;
  }
  std::vector<double> d2(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    const Vector &a = u[i], &b = u[i + 1];
    const Index n = a.size();
    d2[i] = (b.head(n) - a).squaredNorm() + b.tail(b.size() - n).squaredNorm();
  }
  return d2;
}

bool ErrorTable::rates_defined() const { return std::isfinite(mean_rate); }

double pairwise_rate(double e_a, double e_b) {
  if (!(e_a > 0.0 && e_b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_a / e_b) / std::log(2.0);
}

ErrorTable tabulate(Mode mode, const std::vector<Index> &ladder, const Matrix &d2, double theoretical) {
  if (d2.cols() != static_cast<Index>(ladder.size()) || d2.rows() < 1) {
    throw ConfigurationError("difference table does not match the ladder");
  }
  ErrorTable t;
  t.mode = mode;
  t.theoretical = theoretical;
  const double l = static_cast<double>(d2.rows());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double rate_sum = 0.0;
  for (Index c = 0; c < d2.cols(); ++c) {
    double s = 0.0, s2 = 0.0;
    for (Index i = 0; i < d2.rows(); ++i) {
      s += d2(i, c);
      s2 += d2(i, c) * d2(i, c);
    }
    const double mean = s / l;
    ErrorRow row;
    row.resolution = ladder[static_cast<std::size_t>(c)];
    row.error = std::sqrt(mean);
    // sd(e) ~ sd(mean d^2) / (2 e)
    const double var = d2.rows() > 1 ? std::max(0.0, (s2 - s * mean) / (l - 1.0)) : 0.0;
    row.std_error = row.error > 0.0 ? std::sqrt(var / l) / (2.0 * row.error) : 0.0;
    row.rate = c == 0 ? nan : pairwise_rate(t.rows.back().error, row.error);
    if (c > 0) rate_sum += row.rate;
    t.rows.push_back(row);
  }
  t.mean_rate = t.rows.size() > 1 ? rate_sum / static_cast<double>(t.rows.size() - 1) : nan;
  return t;
}

namespace {

// Runs body(i) for i = 0..n-1 on `workers` threads; the first exception is
// rethrown after all threads have joined.
template <class F>
void parallel_for(Index n, unsigned workers, F &&body) {
  if (workers <= 1 || n <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto work = [&] {
    for (Index i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<Index>(workers, n));
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ErrorTable convergence(const ExperimentConfig &cfg) {
  validate(cfg);
  if (cfg.mode != Mode::temporal && cfg.mode != Mode::spatial) {
    throw ConfigurationError("convergence needs mode temporal or spatial");
  }
  const NoiseShape shape = finest_noise(cfg);
  const NoiseFactory factory =
      make_noise_factory(cfg.model.hurst, shape.n_modes, shape.steps, cfg.model.T, cfg.fine_grid);
  const ContourRule rule = build_rule(cfg.contour);
  check_rate_positivity(cfg.model);

  Matrix d2(cfg.samples, static_cast<Index>(cfg.ladder.size()));
  parallel_for(cfg.samples, cfg.workers, [&](Index i) {
    const NoiseSample x = factory.draw(cfg.master_seed, static_cast<std::uint64_t>(i));
    const auto row = path_differences(cfg, x, rule);
    for (std::size_t c = 0; c < row.size(); ++c) d2(i, static_cast<Index>(c)) = row[c];
  });

  const RatePair r = theoretical_rates(cfg.model);
  return tabulate(cfg.mode, cfg.ladder, d2, cfg.mode == Mode::temporal ? r.temporal : r.spatial);
}

ErrorTable temporal_convergence(const ExperimentConfig &cfg) {
  if (cfg.mode != Mode::temporal) throw ConfigurationError("temporal_convergence needs mode temporal");
  return convergence(cfg);
}

ErrorTable spatial_convergence(const ExperimentConfig &cfg) {
  if (cfg.mode != Mode::spatial) throw ConfigurationError("spatial_convergence needs mode spatial");
  return convergence(cfg);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

template <class F>
double best_time(F &&f) {
  using clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity(), total = 0.0;
  for (int rep = 0; rep < 5 && total < 0.3; ++rep) {
    const auto t0 = clock::now();
    f();
    const double dt = std::chrono::duration<double>(clock::now() - t0).count();
    best = std::min(best, dt);
    total += dt;
  }
  return best;
}

}  // namespace

TimingTable timing_compare(const ExperimentConfig &cfg) {
  validate(cfg);
  const ContourRule rule = build_rule(cfg.contour);
  TimingTable t;
  std::vector<double> ms, tc, tf;
  for (Index m : cfg.ladder) {
    ModelParams p = cfg.model;
    p.M = m;
    const NoiseSample x = make_noise_factory(p.hurst, p.N, m, p.T, cfg.fine_grid).draw(cfg.master_seed, 0);
    TimingRow row;
    row.M = m;
    row.classical_seconds = best_time([&] { (void)solve_classical(p, x); });
    row.fast_seconds = best_time([&] { (void)solve_fast(p, x, rule); });
    t.rows.push_back(row);
    ms.push_back(static_cast<double>(m));
    tc.push_back(row.classical_seconds);
    tf.push_back(row.fast_seconds);
  }
  if (t.rows.size() >= 2) {
    t.classical_slope = loglog_slope(ms, tc);
    t.fast_slope = loglog_slope(ms, tf);
  } else {
    t.classical_slope = t.fast_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return t;
}

SchemeTrajectory single_run(const ExperimentConfig &cfg) {
  validate(cfg);
  const ModelParams &p = cfg.model;
  const NoiseSample x = make_noise_factory(p.hurst, p.N, p.M, p.T, cfg.fine_grid).draw(cfg.master_seed, 0);
  check_rate_positivity(p);
  return solve(p, x, cfg.variant, build_rule(cfg.contour));
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_errors_csv(const ErrorTable &t, std::ostream &os) {
  os << "resolution,error,stderr,rate\n";
  for (const auto &r : t.rows) {
    os << r.resolution << ',' << num(r.error) << ',' << num(r.std_error) << ',' << num(r.rate) << '\n';
  }
}

void write_rates_csv(const ErrorTable &t, std::ostream &os) {
  os << "observed_mean,theoretical\n" << num(t.mean_rate) << ',' << num(t.theoretical) << '\n';
}

void write_timing_csv(const TimingTable &t, std::ostream &os) {
  os << "M,classical_seconds,fast_seconds\n";
  for (const auto &r : t.rows) os << r.M << ',' << num(r.classical_seconds) << ',' << num(r.fast_seconds) << '\n';
}

void write_error_series(const ErrorTable &t, std::ostream &os) {
  for (const auto &r : t.rows) os << r.resolution << ' ' << num(r.error) << '\n';
}

void write_timing_series(const TimingTable &t, Variant v, std::ostream &os) {
  for (const auto &r : t.rows) {
    os << r.M << ' ' << num(v == Variant::classical ? r.classical_seconds : r.fast_seconds) << '\n';
  }
}

}  // namespace fracspde
