#include "fracspde/scheme.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fracspde/mittag_leffler.hpp"

namespace fracspde {

Source Source::sine() { return {}; }

Source Source::constant_value(double c) {
  Source s;
  std::ostringstream os;
  os << "const:" << c;
  s.name = os.str();
  s.f = [c](double) { return c; };
  s.lipschitz = 0.0;
  s.constant = c;
  return s;
}

Source Source::zero() {
  Source s = constant_value(0.0);
  s.name = "zero";
  return s;
}

Source Source::custom(std::string name, std::function<double(double)> f, double lipschitz) {
  if (!f) throw InvalidParameter("source function is empty");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
    throw InvalidParameter("source must declare a finite Lipschitz constant");
  }
  Source s;
  s.name = std::move(name);
  s.f = std::move(f);
  s.lipschitz = lipschitz;
  return s;
}

Source Source::by_name(const std::string &name) {
  if (name == "sin") return sine();
  if (name == "zero") return zero();
  if (name.rfind("const:", 0) == 0) {
    std::size_t used = 0;
    const std::string num = name.substr(6);
    double c = 0.0;
    try {
      c = std::stod(num, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !std::isfinite(c)) {
      throw InvalidParameter("bad constant source '" + name + "'");
    }
    return constant_value(c);
  }
  throw InvalidParameter("unknown source '" + name + "' (expected sin, zero or const:<c>)");
}

void validate(const ModelParams &p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
  if (!(p.s > 0.0 && p.s < 1.0)) throw InvalidParameter("s must lie in (0,1)");
  validate(p.hurst);
  if (!(p.T > 0.0) || !std::isfinite(p.T)) throw InvalidParameter("T must be positive");
  if (p.N < 1) throw InvalidParameter("N must be >= 1");
  if (p.M < 1) throw InvalidParameter("M must be >= 1");
  if (!p.f.f) throw InvalidParameter("source function is empty");
  if (!(p.f.lipschitz >= 0.0) || !std::isfinite(p.f.lipschitz)) {
    throw InvalidParameter("source must declare a finite Lipschitz constant");
  }
  if (p.initial.size() != 0 && p.initial.size() != p.N) {
    throw InvalidParameter("initial state must have N coefficients");
  }
}

RatePair theoretical_rates(double alpha, double s, const HurstPair &h) {
  RatePair r;
  r.spatial = std::min(2.0 * s * h.h2 / alpha + h.h1 - 1.0, h.h1 + 2.0 * s - 1.0);
  r.temporal = h.h2 + alpha * (h.h1 - 1.0) / (2.0 * s);
  return r;
}

RatePair theoretical_rates(const ModelParams &p) { return theoretical_rates(p.alpha, p.s, p.hurst); }

void check_rate_positivity(const ModelParams &p) {
  const double a = 2.0 * p.s * p.hurst.h2 / p.alpha + p.hurst.h1 - 1.0;
  const double b = p.hurst.h1 + 2.0 * p.s - 1.0;
  if (a <= 0.0) {
    std::ostringstream os;
    os << "2 s H2/alpha + H1 - 1 = " << a << " <= 0: no spatial regularity is guaranteed";
    warn(os.str());
  }
  if (b <= 0.0) {
    std::ostringstream os;
    os << "H1 + 2 s - 1 = " << b << " <= 0: no spatial regularity is guaranteed";
    warn(os.str());
  }
}

void check_contour_coupling(const ModelParams &p, const ContourParams &c) {
  const RatePair r = theoretical_rates(p);
  const double quad = std::pow(error_bound(c), 2);
  const double budget = std::pow(p.tau(), 2.0 + r.temporal) *
                        std::pow(static_cast<double>(p.N), -r.spatial - 2.0 + 2.0 * p.hurst.h1);
  if (quad > budget) {
    std::ostringstream os;
    os << "contour L=" << c.L << " too small for tau=" << p.tau() << ", N=" << p.N
       << ": squared quadrature error " << quad << " exceeds budget " << budget;
    warn(os.str());
  }
}

std::string to_string(Variant v) { return v == Variant::classical ? "classical" : "fast"; }

Variant variant_from_string(const std::string &s) {
  if (s == "classical") return Variant::classical;
  if (s == "fast") return Variant::fast;
  throw InvalidParameter("unknown solver '" + s + "' (expected classical or fast)");
}

namespace {

// P_N f(u_N): sum the sine series on 4N+1 points, apply f, project.
class SourceProjector {
 public:
  SourceProjector(const Source &src, Index n) : src_(src) {
    if (src.constant) {
      constant_ = constant_coefficients(*src.constant, n);
    } else {
      const Index pts = min_grid_points(n);
      synth_ = synthesis_matrix(n, pts);
      proj_ = projection_matrix(n, pts);
      grid_.resize(pts);
    }
  }

  // Writes P_N f(u) into out.
  void operator()(const Eigen::Ref<const Vector> &u, Vector &out) {
    if (src_.constant) {
      out = constant_;
      return;
    }
    grid_.noalias() = synth_ * u;
    for (Index i = 0; i < grid_.size(); ++i) grid_(i) = src_.f(grid_(i));
    out.noalias() = proj_ * grid_;
  }

 private:
  const Source &src_;
  Vector constant_;
  Matrix synth_, proj_;
  Vector grid_;
};

void check_noise(const ModelParams &p, const NoiseSample &noise) {
  if (noise.n_modes() != p.N || noise.steps() != p.M) {
    throw ConfigurationError("noise is " + std::to_string(noise.n_modes()) + "x" + std::to_string(noise.steps()) +
                             ", solver expects " + std::to_string(p.N) + "x" + std::to_string(p.M));
  }
  if (std::abs(noise.tau - p.tau()) > 1e-12 * p.tau()) {
    throw ConfigurationError("noise time step does not match T/M");
  }
}

// Response to the initial data, E_{alpha,1}(-lambda_k^s t_n^alpha) u0_k, for
// n = 0..M; empty for zero initial data.
Matrix initial_response(const ModelParams &p, const Vector &lam) {
  if (p.initial.size() == 0 || p.initial.isZero(0.0)) return {};
  const MittagLeffler e1({p.alpha, 1.0});
  Matrix r(p.N, p.M + 1);
  r.col(0) = p.initial;
  for (Index n = 1; n <= p.M; ++n) {
    const double ta = std::pow(p.tau() * n, p.alpha);
    for (Index k = 0; k < p.N; ++k) r(k, n) = e1(-lam(k) * ta) * p.initial(k);
  }
  return r;
}

SchemeTrajectory start(const ModelParams &p, Variant v) {
  validate(p);
  SchemeTrajectory tr;
  tr.params = p;
  tr.variant = v;
  tr.states = Matrix::Zero(p.N, p.M + 1);
  return tr;
}

}  // namespace

SchemeTrajectory solve_classical(const ModelParams &p, const NoiseSample &noise) {
  SchemeTrajectory tr = start(p, Variant::classical);
  check_noise(p, noise);
  const Index n_modes = p.N, m_steps = p.M;
  const double tau = p.tau();
  const Vector lam = eigenvalue_powers(n_modes, p.s);

  // W(m, k) = K_k(t_{m+1}) - K_k(t_m), stored per mode contiguously.
  Matrix w(m_steps, n_modes);
  {
    const MittagLeffler e2({p.alpha, 2.0});
    Vector prev = Vector::Zero(n_modes);
    for (Index m = 1; m <= m_steps; ++m) {
      const double t = tau * m;
      const double ta = std::pow(t, p.alpha);
      for (Index k = 0; k < n_modes; ++k) {
        const double kv = t * e2(-lam(k) * ta);
        w(m - 1, k) = kv - prev(k);
        prev(k) = kv;
      }
    }
  }

  // Sources are stored back to front, s^i in row M - i, so that the
  // convolution at step n is a forward dot product of two contiguous blocks.
  Matrix rev(m_steps, n_modes);
  SourceProjector project_f(p.f, n_modes);
  const Matrix init = initial_response(p, lam);
  Vector fhat(n_modes), u = init.size() ? Vector(init.col(0)) : Vector::Zero(n_modes);
  const double inv_tau = 1.0 / tau;
  for (Index n = 1; n <= m_steps; ++n) {
    project_f(u, fhat);
    rev.row(m_steps - n) = (fhat + noise.x.col(n - 1) * inv_tau).transpose();
    for (Index k = 0; k < n_modes; ++k) {
      tr.states(k, n) = w.col(k).head(n).dot(rev.col(k).segment(m_steps - n, n));
    }
    u = tr.states.col(n);
    if (init.size()) u += init.col(n);
  }
  if (init.size()) tr.states += init;
  return tr;
}

HistoryBank::HistoryBank(const ContourRule &rule, double alpha, const Vector &lambda_s, double tau) {
  const Index nodes = rule.half() + 1;
  const Index n_modes = lambda_s.size();
  er_.resize(nodes);
  ei_.resize(nodes);
  ar_.resize(nodes, n_modes);
  ai_.resize(nodes, n_modes);
  kappa_ = Vector::Zero(n_modes);
  for (Index j = 0; j < nodes; ++j) {
    const Complex z = rule.node(j);
    const Complex ez = std::exp(z * tau);
    const Complex za = std::pow(z, alpha);
    const Complex g = (j == 0 ? 1.0 : 2.0) * rule.weight(j) * za / (z * z);
    er_(j) = ez.real();
    ei_(j) = ez.imag();
    for (Index k = 0; k < n_modes; ++k) {
      const Complex gk = g / (za + lambda_s(k));
      const Complex a = (ez - 1.0) * gk;
      ar_(j, k) = a.real();
      ai_(j, k) = a.imag();
      kappa_(k) += gk.real();
    }
  }
  hr_ = Array::Zero(nodes, n_modes);
  hi_ = Array::Zero(nodes, n_modes);
  tmp_.resize(nodes, n_modes);
  last_ = Vector::Zero(n_modes);
}

void HistoryBank::push(const Vector &source) {
  const auto s = source.transpose().array();
  tmp_ = hr_.colwise() * er_ - hi_.colwise() * ei_ + ar_.rowwise() * s;
  hi_ = hi_.colwise() * er_ + hr_.colwise() * ei_ + ai_.rowwise() * s;
  hr_.swap(tmp_);
  last_ = source;
}

Vector HistoryBank::values() const {
  return hr_.colwise().sum().matrix().transpose() + kappa_.cwiseProduct(last_);
}

void HistoryBank::reset() {
  hr_.setZero();
  hi_.setZero();
  last_.setZero();
}

ComplexMatrix HistoryBank::history() const {
  ComplexMatrix h(hr_.rows(), hr_.cols());
  h.real() = hr_.matrix();
  h.imag() = hi_.matrix();
  return h;
}

ComplexVector HistoryBank::decay() const {
  ComplexVector e(er_.size());
  e.real() = er_.matrix();
  e.imag() = ei_.matrix();
  return e;
}

ComplexMatrix HistoryBank::gains() const {
  ComplexMatrix a(ar_.rows(), ar_.cols());
  a.real() = ar_.matrix();
  a.imag() = ai_.matrix();
  return a;
}

SchemeTrajectory solve_fast(const ModelParams &p, const NoiseSample &noise, const ContourRule &rule) {
  SchemeTrajectory tr = start(p, Variant::fast);
  check_noise(p, noise);
  if (!(p.alpha < 1.0)) throw InvalidParameter("fast solver needs alpha < 1");
  check_horizon(rule.params, p.T);
  check_contour_coupling(p, rule.params);
  const Index n_modes = p.N;
  const double tau = p.tau();
  const Vector lam = eigenvalue_powers(n_modes, p.s);
  HistoryBank bank(rule, p.alpha, lam, tau);
  SourceProjector project_f(p.f, n_modes);
  const Matrix init = initial_response(p, lam);
  Vector fhat(n_modes), src(n_modes), u = init.size() ? Vector(init.col(0)) : Vector::Zero(n_modes);
  const double inv_tau = 1.0 / tau;
  for (Index n = 1; n <= p.M; ++n) {
    project_f(u, fhat);
    src = fhat + noise.x.col(n - 1) * inv_tau;
    bank.push(src);
    tr.states.col(n) = bank.values();
    u = tr.states.col(n);
    if (init.size()) u += init.col(n);
  }
  if (init.size()) tr.states += init;
  return tr;
}

SchemeTrajectory solve(const ModelParams &p, const NoiseSample &noise, Variant v, const ContourRule &rule) {
  return v == Variant::classical ? solve_classical(p, noise) : solve_fast(p, noise, rule);
}

SpectralState linear_oracle(const ModelParams &p, double c, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be nonnegative");
  const Vector lam = eigenvalue_powers(p.N, p.s);
  const Vector ones = constant_coefficients(c, p.N);
  SpectralState out(p.N);
  if (t == 0.0) return out;
  const MittagLeffler e2({p.alpha, 2.0});
  const double ta = std::pow(t, p.alpha);
  for (Index k = 0; k < p.N; ++k) out.coeffs(k) = ones(k) * t * e2(-lam(k) * ta);
  return out;
}

void write_trajectory_csv(const SchemeTrajectory &traj, std::ostream &os, bool all_steps) {
  os << "n,t_n";
  for (Index k = 1; k <= traj.states.rows(); ++k) os << ",coeff_" << k;
  os << '\n';
  char buf[32];
  const Index last = traj.states.cols() - 1;
  for (Index n = all_steps ? 0 : last; n <= last; ++n) {
    os << n;
    std::snprintf(buf, sizeof buf, "%.17g", traj.time(n));
    os << ',' << buf;
    for (Index k = 0; k < traj.states.rows(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states(k, n));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace fracspde
