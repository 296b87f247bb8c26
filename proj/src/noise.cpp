#include "fracspde/noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

namespace fracspde {

void validate(const HurstPair &h) {
  auto ok = [](double v) { return v > 0.0 && v <= 0.5; };
  if (!ok(h.h1)) throw InvalidParameter("h1 must lie in (0, 1/2]");
  if (!ok(h.h2)) throw InvalidParameter("h2 must lie in (0, 1/2]");
}

Matrix cholesky_with_jitter(const Matrix &a) {
  const Index n = a.rows();
  if (n == 0) return a;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    return llt.matrixL();
  }
  double jitter = 1e-12 * a.trace() / static_cast<double>(n);
  if (!(jitter > 0.0)) jitter = 1e-12;
  for (int attempt = 0; attempt < 3; ++attempt, jitter *= 10.0) {
    Matrix b = a;
    b.diagonal().array() += jitter;
    llt.compute(b);
    if (llt.info() == Eigen::Success) {
      warn("covariance factorization needed diagonal jitter " + std::to_string(jitter));
      return llt.matrixL();
    }
  }
  throw CovarianceDegenerate("covariance matrix is not positive definite even after jitter");
}

namespace {

// Second difference of |d|^{2H}: correlation of unit fGn increments at lag d.
double fgn_corr(double hurst, Index lag) {
  const double d = static_cast<double>(std::abs(lag));
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(d + 1.0, e) + std::pow(std::abs(d - 1.0), e) - 2.0 * std::pow(d, e));
}

}  // namespace

double TimeIncrementCov::entry(Index i, Index m) const {
  if (white) return i == m ? tau : 0.0;
  return matrix(i, m);
}

Matrix TimeIncrementCov::dense() const {
  if (!white) return matrix;
  return tau * Matrix::Identity(steps, steps);
}

TimeIncrementCov time_increment_cov(double h2, Index steps, double horizon) {
  if (steps < 1) throw InvalidParameter("number of time steps must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParameter("time horizon must be positive");
  if (!(h2 > 0.0 && h2 <= 0.5)) throw InvalidParameter("h2 must lie in (0, 1/2]");
  TimeIncrementCov c;
  c.h2 = h2;
  c.steps = steps;
  c.tau = horizon / static_cast<double>(steps);
  if (h2 == 0.5) {
    c.white = true;
    return c;
  }
  const double scale = std::pow(c.tau, 2.0 * h2);
  Vector col(steps);
  for (Index d = 0; d < steps; ++d) col(d) = scale * fgn_corr(h2, d);
  c.matrix.resize(steps, steps);
  for (Index i = 0; i < steps; ++i) {
    for (Index m = 0; m < steps; ++m) c.matrix(i, m) = col(std::abs(i - m));
  }
  c.chol = cholesky_with_jitter(c.matrix);
  return c;
}

Index default_fine_grid(Index n_modes) {
  Index nf = 4096;
  while (nf < 64 * n_modes) nf *= 2;
  return nf;
}

SpatialProjCov spatial_proj_cov(double h1, Index n_modes, Index fine_grid) {
  if (n_modes < 1) throw InvalidParameter("number of modes must be >= 1");
  if (!(h1 > 0.0 && h1 <= 0.5)) throw InvalidParameter("h1 must lie in (0, 1/2]");
  if (fine_grid == 0) fine_grid = default_fine_grid(n_modes);
  if (fine_grid < 64 * n_modes) {
    throw ConfigurationError("fine grid " + std::to_string(fine_grid) + " is below 64 N = " +
                             std::to_string(64 * n_modes));
  }
  const Index nf = fine_grid;
  const double h = 1.0 / static_cast<double>(nf);

  Matrix v(nf, n_modes);
  for (Index k = 0; k < n_modes; ++k) {
    const double kp = static_cast<double>(k + 1) * kPi;
    for (Index c = 0; c < nf; ++c) v(c, k) = std::numbers::sqrt2 * std::sin(kp * (c + 0.5) * h);
  }

  Matrix cv(nf, n_modes);
  if (h1 == 0.5) {
    cv = h * v;
  } else {
    // C_f is Toeplitz; multiply through its circulant embedding of size 2 nf.
    const double scale = std::pow(h, 2.0 * h1);
    const Index m = 2 * nf;
    std::vector<double> first(m, 0.0);
    for (Index d = 0; d < nf; ++d) first[d] = scale * fgn_corr(h1, d);
    for (Index d = 1; d < nf; ++d) first[m - d] = first[d];
    Eigen::FFT<double> fft;
    std::vector<Complex> eig;
    fft.fwd(eig, first);
    std::vector<double> buf(m), out;
    std::vector<Complex> spec;
    for (Index k = 0; k < n_modes; ++k) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (Index c = 0; c < nf; ++c) buf[c] = v(c, k);
      fft.fwd(spec, buf);
      for (Index i = 0; i < m; ++i) spec[i] *= eig[i];
      fft.inv(out, spec);
      for (Index c = 0; c < nf; ++c) cv(c, k) = out[c];
    }
  }

  SpatialProjCov q;
  q.h1 = h1;
  q.fine_grid = nf;
  q.matrix = v.transpose() * cv;
  q.matrix = (0.5 * (q.matrix + q.matrix.transpose())).eval();
  q.chol = cholesky_with_jitter(q.matrix);
  return q;
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

NoiseSample sample_noise(const SpatialProjCov &q, const TimeIncrementCov &c, Rng &rng) {
  const Index n = q.matrix.rows();
  const Index m = c.steps;
  std::normal_distribution<double> normal;
  Matrix z(n, m);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < m; ++i) z(k, i) = normal(rng);
  }
  NoiseSample s;
  s.tau = c.tau;
  s.hurst = {q.h1, c.h2};
  const Matrix lz = q.chol.triangularView<Eigen::Lower>() * z;
  if (c.white) {
    s.x = std::sqrt(c.tau) * lz;
  } else {
    s.x = lz * c.chol.transpose().triangularView<Eigen::Upper>();
  }
  return s;
}

NoiseSample zero_noise(Index n_modes, Index steps, double horizon) {
  if (n_modes < 1 || steps < 1) throw InvalidParameter("noise dimensions must be positive");
  NoiseSample s;
  s.x = Matrix::Zero(n_modes, steps);
  s.tau = horizon / static_cast<double>(steps);
  return s;
}

NoiseSample coarsen_time(const NoiseSample &s, Index factor) {
  if (factor < 1 || s.steps() % factor != 0) {
    throw ConfigurationError("coarsening factor " + std::to_string(factor) + " does not divide M = " +
                             std::to_string(s.steps()));
  }
  NoiseSample out = s;
  const Index mc = s.steps() / factor;
  out.tau = s.tau * static_cast<double>(factor);
  out.x.resize(s.n_modes(), mc);
  // left to right, so the result is reproducible by hand
  for (Index i = 0; i < mc; ++i) {
    out.x.col(i) = s.x.col(i * factor);
    for (Index r = 1; r < factor; ++r) out.x.col(i) += s.x.col(i * factor + r);
  }
  return out;
}

NoiseSample truncate_modes(const NoiseSample &s, Index n_small) {
  if (n_small < 1 || n_small > s.n_modes()) {
    throw ConfigurationError("cannot truncate " + std::to_string(s.n_modes()) + " modes to " +
                             std::to_string(n_small));
  }
  NoiseSample out = s;
  out.x = s.x.topRows(n_small);
  return out;
}

namespace {

template <class T>
void put(std::ostream &os, T v) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char *>(&bits), 8);
}

template <class T>
T get(std::istream &is) {
  std::uint64_t bits = 0;
  is.read(reinterpret_cast<char *>(&bits), 8);
  if (!is) throw IoError("truncated noise file");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_noise(const NoiseSample &s, const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  put<std::uint64_t>(os, s.n_modes());
  put<std::uint64_t>(os, s.steps());
  put(os, s.tau);
  put(os, s.hurst.h1);
  put(os, s.hurst.h2);
  put<std::uint64_t>(os, s.seed);
  for (Index k = 0; k < s.n_modes(); ++k) {
    for (Index i = 0; i < s.steps(); ++i) put(os, s.x(k, i));
  }
  if (!os.flush()) throw IoError("write failed for " + path.string());
}

NoiseSample read_noise(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto n = get<std::uint64_t>(is);
  const auto m = get<std::uint64_t>(is);
  if (n == 0 || m == 0 || n > (1u << 20) || m > (1u << 26)) throw IoError("implausible noise dimensions");
  NoiseSample s;
  s.tau = get<double>(is);
  s.hurst.h1 = get<double>(is);
  s.hurst.h2 = get<double>(is);
  s.seed = get<std::uint64_t>(is);
  s.x.resize(static_cast<Index>(n), static_cast<Index>(m));
  for (Index k = 0; k < s.n_modes(); ++k) {
    for (Index i = 0; i < s.steps(); ++i) s.x(k, i) = get<double>(is);
  }
  return s;
}

}  // namespace fracspde
