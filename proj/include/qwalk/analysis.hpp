#pragma once

#include "engine.hpp"
#include "walks.hpp"

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

namespace qwalk {

namespace detail {

// g = cos(omega) = n u_w(k) together with its gradient and Hessian.
struct CosOmega {
  double g = 1.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

inline CosOmega cos_omega(const WaveVector& k, const WalkSpec& spec) {
  spec.validate();
  if (k.size() != spec.dim) throw InvalidInput("wave-vector dimension mismatch");
  const WeylTrig w = weyl_trig(spec.dim, spec.chirality, spec.branch);
  const double n = spec.n();
  return CosOmega {n * w.u.value(k), n * w.u.gradient(k), n * w.u.hessian(k)};
}

inline double checked_sin(const WaveVector& k, const WalkSpec& spec) {
  const double s = phase(k, spec).s;
  if (s < 1e-9) throw SingularPoint("dispersion extremum: derivatives of omega are singular");
  return s;
}

}  // namespace detail

// grad omega = -grad g / sin omega.
inline Eigen::VectorXd group_velocity(const WaveVector& k, const WalkSpec& spec) {
  const double s = detail::checked_sin(k, spec);
  return -detail::cos_omega(k, spec).grad / s;
}

// Hessian of arccos g: -H_g / sin omega - g grad g grad g^T / sin^3 omega.
inline Eigen::MatrixXd diffusion_tensor(const WaveVector& k, const WalkSpec& spec) {
  const double s = detail::checked_sin(k, spec);
  const detail::CosOmega c = detail::cos_omega(k, spec);
  Eigen::MatrixXd h = -c.hess / s - c.g * c.grad * c.grad.transpose() / (s * s * s);
  return (h + h.transpose()) / 2.0;
}

// Central differences of the closed-form dispersion: the independent oracle.
inline Eigen::VectorXd group_velocity_fd(const WaveVector& k, const WalkSpec& spec, double h = 1e-5) {
  Eigen::VectorXd g(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    WaveVector kp = k, km = k;
    kp[i] += h;
    km[i] -= h;
    g[i] = (phase(kp, spec).omega() - phase(km, spec).omega()) / (2.0 * h);
  }
  return g;
}

// Fourth-order stencils: the nested first-derivative stencil off the diagonal, the five-point
// second derivative on it.
inline Eigen::MatrixXd diffusion_tensor_fd(const WaveVector& k, const WalkSpec& spec, double h = 1e-3) {
  const auto d = k.size();
  Eigen::MatrixXd m(d, d);
  auto w = [&](Eigen::Index i, double a, Eigen::Index j, double b) {
    WaveVector q = k;
    q[i] += a * h;
    q[j] += b * h;
    return phase(q, spec).omega();
  };
  const std::array<double, 4> off {-2, -1, 1, 2}, wt {1, -8, 8, -1};
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double acc = 0.0;
      if (i == j) {
        acc = -w(i, 2, j, 0) + 16 * w(i, 1, j, 0) - 30 * w(i, 0, j, 0) + 16 * w(i, -1, j, 0) - w(i, -2, j, 0);
        m(i, j) = acc / (12.0 * h * h);
        continue;
      }
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) acc += wt[a] * wt[b] * w(i, off[a], j, off[b]);
      m(i, j) = acc / (144.0 * h * h);
    }
  return m;
}

struct PacketModel {
  WaveVector k0;
  int sign = 1;  // +1: band e^{-i omega}, -1: band e^{+i omega}
  double omega0 = 0.0;
  Eigen::VectorXd v;
  Eigen::MatrixXd D;
};

inline PacketModel packet_model(const WaveVector& k0, const WalkSpec& spec, int sign = 1) {
  if (sign != 1 && sign != -1) throw InvalidInput("band sign must be +1 or -1");
  return PacketModel {k0, sign, phase(k0, spec).omega(), group_velocity(k0, spec), diffusion_tensor(k0, spec)};
}

// Fraction of momentum probability within |bz_wrap(q - k0)| <= window.
inline double band_fraction(const FieldState& st, const WaveVector& k0, double window) {
  const std::vector<double> p = momentum_distribution(st);
  double in = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m)
    if (bz_wrap(WaveVector(fiber_momentum(st, m) - k0)).norm() <= window) in += p[m];
  return in;
}

struct SchrodingerOptions {
  double window = 0.5;
  double required_fraction = 0.99;
  std::vector<std::string>* warnings = nullptr;
};

// Exact Fourier-space integration of the second-order packet equation.
inline FieldState schrodinger_evolve(const FieldState& initial, const PacketModel& model, long n_steps,
                                     const SchrodingerOptions& opt = {}) {
  if (n_steps < 0) throw InvalidInput("step count must be non-negative");
  if (model.k0.size() != initial.d) throw InvalidInput("model dimension mismatch");
  if (opt.warnings && band_fraction(initial, model.k0, opt.window) < opt.required_fraction)
    opt.warnings->push_back("packet is not narrow-band around k0; the second-order model may be inaccurate");
  std::vector<cplx> a = to_momentum(initial);
  const auto s = static_cast<std::size_t>(initial.s);
  const double n = static_cast<double>(n_steps);
  for (std::size_t m = 0; m < initial.sites(); ++m) {
    const WaveVector dq = bz_wrap(WaveVector(fiber_momentum(initial, m) - model.k0));
    const double arg = model.omega0 + model.v.dot(dq) + 0.5 * dq.dot(model.D * dq);
    const cplx ph = std::exp(-I_ * (static_cast<double>(model.sign) * n * arg));
    for (std::size_t c = 0; c < s; ++c) a[m * s + c] *= ph;
  }
  detail::fft_plan(initial.N, initial.d, initial.s).backward(a);
  FieldState out = initial;
  out.amp = std::move(a);
  out.t += n_steps;
  return out;
}

// exp(-i n H0(k)) fiber by fiber with the relativistic-limit Hamiltonian on zone-reduced k.
inline FieldState continuum_reference(const FieldState& initial, const WalkSpec& spec, long n_steps) {
  if (n_steps < 0) throw InvalidInput("step count must be non-negative");
  detail::check_shape(initial, spec);
  std::vector<cplx> a = to_momentum(initial);
  const auto s = static_cast<Eigen::Index>(initial.s);
  const double n = static_cast<double>(n_steps);
  for (std::size_t m = 0; m < initial.sites(); ++m) {
    const Mat h0 = relativistic_hamiltonian(fiber_momentum(initial, m), spec);
    Eigen::SelfAdjointEigenSolver<Mat> es(h0);
    Eigen::VectorXcd ph(s);
    for (Eigen::Index i = 0; i < s; ++i) ph[i] = std::exp(-I_ * (n * es.eigenvalues()[i]));
    Eigen::Map<Eigen::VectorXcd> fiber(a.data() + m * static_cast<std::size_t>(s), s);
    fiber = (es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * fiber))).eval();
  }
  detail::fft_plan(initial.N, initial.d, initial.s).backward(a);
  FieldState out = initial;
  out.amp = std::move(a);
  out.t += n_steps;
  return out;
}

struct Comparison {
  double fidelity = 0.0;  // |<a|b>|
  double l2 = 0.0;        // ||a - b||
  double l1 = 0.0;        // sum over sites of |p_a - p_b|
};

inline Comparison compare(const FieldState& a, const FieldState& b) {
  if (a.N != b.N || a.d != b.d || a.s != b.s || a.amp.size() != b.amp.size())
    throw InvalidInput("states have different lattice shapes");
  Comparison c;
  cplx overlap {0.0, 0.0};
  double l2 = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i) {
    overlap += std::conj(a.amp[i]) * b.amp[i];
    l2 += std::norm(a.amp[i] - b.amp[i]);
  }
  c.fidelity = std::min(1.0, std::abs(overlap));
  c.l2 = std::sqrt(l2);
  const auto s = static_cast<std::size_t>(a.s);
  for (std::size_t site = 0; site < a.sites(); ++site) {
    double pa = 0.0, pb = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      pa += std::norm(a.amp[site * s + k]);
      pb += std::norm(b.amp[site * s + k]);
    }
    c.l1 += std::abs(pa - pb);
  }
  return c;
}

// Largest eigenphase mismatch per step between the walk symbol and exp(-i H0), both from
// numeric eigendecompositions.
inline double eigenphase_error(const WaveVector& k, const WalkSpec& spec) {
  Eigen::ComplexEigenSolver<Mat> walk(symbol(k, spec).matrix);
  Eigen::SelfAdjointEigenSolver<Mat> cont(relativistic_hamiltonian(k, spec));
  std::vector<double> wp, cp;
  for (Eigen::Index i = 0; i < walk.eigenvalues().size(); ++i) wp.push_back(-std::arg(walk.eigenvalues()[i]));
  for (Eigen::Index i = 0; i < cont.eigenvalues().size(); ++i) cp.push_back(cont.eigenvalues()[i]);
  std::sort(wp.begin(), wp.end());
  std::sort(cp.begin(), cp.end());
  double err = 0.0;
  for (std::size_t i = 0; i < wp.size(); ++i) err = std::max(err, std::abs(wp[i] - cp[i]));
  return err;
}

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

// Least-squares line through (log x, log y).
inline PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("power-law fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("power-law fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return PowerFit {slope, std::exp((sy - slope * sx) / n)};
}

struct TrajectoryRow {
  long step = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  double fidelity = 1.0;  // against the second-order packet model
};

// Walk evolution sampled every `stride` steps, each sample computed directly from the initial state.
inline std::vector<TrajectoryRow> packet_trajectory(const FieldState& initial, const WalkSpec& spec,
                                                    const PacketModel& model, long n_steps, long stride) {
  if (stride < 1) throw InvalidInput("trajectory stride must be positive");
  std::vector<TrajectoryRow> rows;
  for (long n = 0; n <= n_steps; n += stride) {
    const FieldState w = step_momentum(initial, spec, n);
    const Observables o = observables(w);
    rows.push_back({n, o.mean, o.variance, compare(w, schrodinger_evolve(initial, model, n)).fidelity});
  }
  return rows;
}

}  // namespace qwalk
