#pragma once

#include "kernel.hpp"
#include "lattice.hpp"
#include "walks.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

namespace qwalk {

// Field on the periodic lattice Z_N^d, sites in generator coordinates (first axis slowest),
// amplitude index = site * s + component.
struct FieldState {
  int N = 0;
  int d = 1;
  int s = 2;
  long t = 0;
  std::vector<cplx> amp;

  std::size_t sites() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(N);
    return n;
  }
  Eigen::VectorXi site_coords(std::size_t site) const {
    Eigen::VectorXi n(d);
    for (int i = d - 1; i >= 0; --i) {
      n[i] = static_cast<int>(site % static_cast<std::size_t>(N));
      site /= static_cast<std::size_t>(N);
    }
    return n;
  }
  std::size_t site_index(const Eigen::VectorXi& n) const {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(((n[i] % N) + N) % N);
    return idx;
  }
  double norm2() const {
    double acc = 0.0;
    for (const cplx& a : amp) acc += std::norm(a);
    return acc;
  }
};

inline FieldState zero_state(int N, int d, int s) {
  check_dim(d);
  if (N < 2) throw InvalidInput("lattice size must be at least 2");
  if (s < 1) throw InvalidInput("component count must be positive");
  FieldState st;
  st.N = N;
  st.d = d;
  st.s = s;
  st.amp.assign(st.sites() * static_cast<std::size_t>(s), cplx {0.0, 0.0});
  return st;
}

namespace detail {

// FFTW planning is not thread-safe; plans are created once per shape under a lock.
class FftPlan {
 public:
  FftPlan(int N, int d, int s) : total_(1) {
    std::vector<int> dims(static_cast<std::size_t>(d), N);
    for (int i = 0; i < d; ++i) total_ *= static_cast<std::size_t>(N);
    buf_ = fftw_alloc_complex(total_ * static_cast<std::size_t>(s));
    fwd_ = fftw_plan_many_dft(d, dims.data(), s, buf_, nullptr, s, 1, buf_, nullptr, s, 1, FFTW_FORWARD,
                              FFTW_ESTIMATE);
    bwd_ = fftw_plan_many_dft(d, dims.data(), s, buf_, nullptr, s, 1, buf_, nullptr, s, 1, FFTW_BACKWARD,
                              FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  // Unnormalized forward transform: sum_n psi(n) e^{-2 pi i m.n / N}.
  void forward(std::vector<cplx>& a) { run(a, fwd_, 1.0); }
  // Inverse transform including the 1/N^d factor.
  void backward(std::vector<cplx>& a) { run(a, bwd_, 1.0 / static_cast<double>(total_)); }

 private:
  void run(std::vector<cplx>& a, fftw_plan p, double scale) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::copy(a.begin(), a.end(), reinterpret_cast<cplx*>(buf_));
    fftw_execute(p);
    const cplx* out = reinterpret_cast<const cplx*>(buf_);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = out[i] * scale;
  }

  std::size_t total_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::mutex mutex_;
};

inline FftPlan& fft_plan(int N, int d, int s) {
  static std::mutex registry_mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<FftPlan>> plans;
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto& slot = plans[{N, d, s}];
  if (!slot) slot = std::make_unique<FftPlan>(N, d, s);
  return *slot;
}

inline void check_shape(const FieldState& st, const WalkSpec& spec) {
  if (st.d != spec.dim || st.s != spec.components()) throw InvalidInput("state shape does not match the walk");
  if (st.amp.size() != st.sites() * static_cast<std::size_t>(st.s)) throw InvalidInput("state amplitude count mismatch");
}

}  // namespace detail

// Momentum-space amplitudes (unnormalized forward transform), fiber m at index m * s.
inline std::vector<cplx> to_momentum(const FieldState& st) {
  std::vector<cplx> a = st.amp;
  detail::fft_plan(st.N, st.d, st.s).forward(a);
  return a;
}

// Grid wave-vector of momentum index m, reduced to the zone.
inline WaveVector fiber_momentum(const FieldState& st, std::size_t fiber) {
  return bz_wrap(grid_point(lattice(st.d), st.N, st.site_coords(fiber)));
}

// psi -> A^n psi fiber by fiber; the n-th power uses the two-projector form, exact for any n.
inline FieldState step_momentum(const FieldState& st, const WalkSpec& spec, long n_steps) {
  if (n_steps < 0) throw InvalidInput("step count must be non-negative");
  detail::check_shape(st, spec);
  FieldState out = st;
  out.t += n_steps;
  if (n_steps == 0) return out;
  std::vector<cplx> a = to_momentum(st);
  const auto s = static_cast<Eigen::Index>(st.s);
  for (std::size_t m = 0; m < st.sites(); ++m) {
    const WaveVector k = grid_point(lattice(st.d), st.N, st.site_coords(m));
    const Mat sym = symbol(k, spec).matrix;
    const Mat p = n_steps == 1 ? sym : symbol_power(sym, n_steps, phase(k, spec));
    Eigen::Map<Eigen::VectorXcd> fiber(a.data() + m * static_cast<std::size_t>(s), s);
    fiber = (p * fiber).eval();
  }
  detail::fft_plan(st.N, st.d, st.s).backward(a);
  out.amp = std::move(a);
  return out;
}

// psi'(g) = sum_h A_h psi(g - h), the convention matching A_k = sum_h e^{-i k.h} A_h.
inline FieldState step_position(const FieldState& st, const TransitionKernel& K) {
  if (st.d != K.d || st.s != K.s) throw InvalidInput("state shape does not match the kernel");
  if (st.N <= 2 * K.max_extent()) throw InvalidInput("kernel support exceeds the lattice");
  FieldState out = st;
  out.t += 1;
  std::fill(out.amp.begin(), out.amp.end(), cplx {0.0, 0.0});
  const auto s = static_cast<Eigen::Index>(st.s);
  for (std::size_t site = 0; site < st.sites(); ++site) {
    const Eigen::VectorXi g = st.site_coords(site);
    Eigen::Map<Eigen::VectorXcd> dst(out.amp.data() + site * static_cast<std::size_t>(s), s);
    for (const auto& [h, A] : K.terms) {
      Eigen::VectorXi src = g;
      for (int i = 0; i < st.d; ++i) src[i] -= h[static_cast<std::size_t>(i)];
      Eigen::Map<const Eigen::VectorXcd> v(st.amp.data() + st.site_index(src) * static_cast<std::size_t>(s), s);
      dst += A * v;
    }
  }
  return out;
}

// Projector on the e^{-i omega} eigenspace: (I + K)/2 with K = (i/2)(A - A^dag)/sin omega.
inline Mat positive_projector(const WaveVector& k, const WalkSpec& spec) {
  const Phase ph = phase(k, spec);
  if (ph.s < 1e-9) throw SingularPoint("band degeneracy: no positive-frequency projector");
  const Mat a = symbol(k, spec).matrix;
  const Mat kk = (I_ / 2.0) * (a - a.adjoint()) / ph.s;
  return (Mat::Identity(a.rows(), a.cols()) + kk) / 2.0;
}

struct PacketParams {
  WaveVector k0;
  double sigma = 20.0;       // position spread in sites
  Eigen::VectorXd x0;        // center in generator coordinates
  Eigen::VectorXcd spinor;   // normalized before use
  std::vector<int> hermite;  // order per axis, empty = plain Gaussian
  bool project_positive = false;
};

namespace detail {

inline double hermite(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

inline double wrap_offset(double x, int N) {
  const double n = static_cast<double>(N);
  return x - n * std::round(x / n);
}

}  // namespace detail

// Hermite-Gaussian envelope times e^{i k0.r} times the spinor, on the minimal image around x0.
inline FieldState make_packet(const PacketParams& p, int N, const WalkSpec& spec) {
  spec.validate();
  const int d = spec.dim, s = spec.components();
  if (p.k0.size() != d) throw InvalidInput("k0 dimension mismatch");
  if (!(p.sigma >= 2.0)) throw InvalidInput("packet spread must be at least 2 sites");
  if (p.sigma > N / 8.0) throw InvalidInput("packet wider than the lattice allows (sigma > N/8)");
  Eigen::VectorXd x0 = p.x0.size() == 0 ? Eigen::VectorXd::Zero(d) : p.x0;
  if (x0.size() != d) throw InvalidInput("x0 dimension mismatch");
  Eigen::VectorXcd w = p.spinor.size() == 0 ? Eigen::VectorXcd::Unit(s, 0) : p.spinor;
  if (w.size() != s) throw InvalidInput("spinor size mismatch");
  if (p.project_positive) w = positive_projector(p.k0, spec) * w;
  if (w.norm() < 1e-12) throw InvalidInput("spinor has no weight in the requested band");
  w.normalize();
  if (!p.hermite.empty() && p.hermite.size() != static_cast<std::size_t>(d))
    throw InvalidInput("one Hermite order per axis is required");

  FieldState st = zero_state(N, d, s);
  const Lattice& L = lattice(d);
  for (std::size_t site = 0; site < st.sites(); ++site) {
    const Eigen::VectorXi n = st.site_coords(site);
    Eigen::VectorXd off(d);
    for (int i = 0; i < d; ++i) off[i] = detail::wrap_offset(n[i] - x0[i], N);
    const WaveVector r = L.basis * off;
    double env = std::exp(-r.squaredNorm() / (4.0 * p.sigma * p.sigma));
    for (std::size_t i = 0; i < p.hermite.size(); ++i)
      env *= detail::hermite(p.hermite[i], r[static_cast<Eigen::Index>(i)] / (sqrt2 * p.sigma));
    const cplx ph = std::exp(I_ * p.k0.dot(r)) * env;
    for (int c = 0; c < s; ++c) st.amp[site * static_cast<std::size_t>(s) + static_cast<std::size_t>(c)] = ph * w[c];
  }
  const double nrm = std::sqrt(st.norm2());
  if (nrm == 0.0) throw InvalidInput("packet vanishes on the lattice");
  for (cplx& a : st.amp) a /= nrm;
  return st;
}

struct Observables {
  Eigen::VectorXd mean;      // generator coordinates around the circular mean, roughly in [0, N)
  Eigen::VectorXd variance;  // per generator axis
  Eigen::VectorXd mean_cartesian;
  Eigen::VectorXd momentum_mean;  // Cartesian, zone-reduced fibers
  std::vector<double> marginal;   // per site, summed over components
  double norm = 0.0;
};

inline Observables observables(const FieldState& st) {
  Observables o;
  const std::size_t ns = st.sites();
  const auto s = static_cast<std::size_t>(st.s);
  o.marginal.assign(ns, 0.0);
  for (std::size_t site = 0; site < ns; ++site)
    for (std::size_t c = 0; c < s; ++c) o.marginal[site] += std::norm(st.amp[site * s + c]);
  for (double p : o.marginal) o.norm += p;

  const double n = static_cast<double>(st.N);
  Eigen::VectorXcd phasor = Eigen::VectorXcd::Zero(st.d);
  for (std::size_t site = 0; site < ns; ++site) {
    const Eigen::VectorXi x = st.site_coords(site);
    for (int i = 0; i < st.d; ++i) phasor[i] += o.marginal[site] * std::exp(I_ * (2.0 * pi * x[i] / n));
  }
  Eigen::VectorXd center(st.d);
  for (int i = 0; i < st.d; ++i) {
    center[i] = std::arg(phasor[i]) * n / (2.0 * pi);
    if (center[i] < 0.0) center[i] += n;
  }
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(st.d), m2 = Eigen::VectorXd::Zero(st.d);
  for (std::size_t site = 0; site < ns; ++site) {
    const Eigen::VectorXi x = st.site_coords(site);
    for (int i = 0; i < st.d; ++i) {
      const double dx = detail::wrap_offset(x[i] - center[i], st.N);
      m1[i] += o.marginal[site] * dx;
      m2[i] += o.marginal[site] * dx * dx;
    }
  }
  m1 /= o.norm;
  m2 /= o.norm;
  o.mean = center + m1;
  o.variance = m2 - m1.cwiseProduct(m1);
  o.mean_cartesian = lattice(st.d).basis * o.mean;

  const std::vector<cplx> a = to_momentum(st);
  o.momentum_mean = Eigen::VectorXd::Zero(st.d);
  double pk_total = 0.0;
  for (std::size_t m = 0; m < ns; ++m) {
    double pk = 0.0;
    for (std::size_t c = 0; c < s; ++c) pk += std::norm(a[m * s + c]);
    o.momentum_mean += pk * fiber_momentum(st, m);
    pk_total += pk;
  }
  o.momentum_mean /= pk_total;
  return o;
}

// Momentum probability per fiber, normalized to 1.
inline std::vector<double> momentum_distribution(const FieldState& st) {
  const std::vector<cplx> a = to_momentum(st);
  const auto s = static_cast<std::size_t>(st.s);
  std::vector<double> p(st.sites(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    for (std::size_t c = 0; c < s; ++c) p[m] += std::norm(a[m * s + c]);
    total += p[m];
  }
  for (double& x : p) x /= total;
  return p;
}

}  // namespace qwalk
