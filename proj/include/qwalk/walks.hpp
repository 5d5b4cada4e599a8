#pragma once

#include "lattice.hpp"
#include "trig.hpp"

#include <string>
#include <vector>

namespace qwalk {

enum class Family { weyl, dirac };
enum class Chirality { plus, minus };
enum class Branch { A, B };

struct WalkSpec {
  Family family = Family::weyl;
  int dim = 3;
  Chirality chirality = Chirality::plus;
  Branch branch = Branch::A;
  double mass = 0.0;  // Dirac only

  int components() const { return (family == Family::dirac && dim > 1) ? 4 : 2; }
  double n() const { return family == Family::dirac ? std::sqrt(1.0 - mass * mass) : 1.0; }
  double m() const { return family == Family::dirac ? mass : 0.0; }
  double chi() const { return chirality == Chirality::plus ? 1.0 : -1.0; }

  void validate() const {
    check_dim(dim);
    if (family == Family::dirac && !(std::abs(mass) <= 1.0)) throw MassOutOfRange(mass);
  }

  std::string name() const {
    std::string s = family == Family::weyl ? "weyl" : "dirac";
    s += std::to_string(dim) + "d";
    if (!(family == Family::dirac && dim == 1)) s += chirality == Chirality::plus ? "+" : "-";
    if (branch == Branch::B) s += "/B";
    if (family == Family::dirac) s += " m=" + std::to_string(mass);
    return s;
  }
};

inline WalkSpec weyl(int d, Chirality c = Chirality::plus, Branch b = Branch::A) {
  return WalkSpec {Family::weyl, d, c, b, 0.0};
}
inline WalkSpec dirac(int d, double m, Chirality c = Chirality::plus, Branch b = Branch::A) {
  WalkSpec s {Family::dirac, d, c, b, m};
  s.validate();
  return s;
}

// u and Pauli vector of the 2x2 Weyl symbol, A = u I - i sigma.n. The Pauli vector folds
// in sigma^- = sigma^T and the transpose branch, so (i/2)(A - A^dag) = sigma.n always.
struct WeylContent {
  double u = 1.0;
  Vec3 n = Vec3::Zero();
};

inline WeylContent weyl_content(const WaveVector& k, int d, Chirality c, Branch b) {
  check_dim(d);
  if (k.size() != d) throw InvalidInput("wave-vector dimension mismatch");
  const double chi = c == Chirality::plus ? 1.0 : -1.0;
  WeylContent w;
  if (d == 1) {
    w.u = std::cos(k[0]);
    w.n = Vec3(chi * std::sin(k[0]), 0.0, 0.0);
    return w;  // sigma_x is symmetric, transposition changes nothing
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const double cx = std::cos(k[0] * scale), sx = std::sin(k[0] * scale);
  const double cy = std::cos(k[1] * scale), sy = std::sin(k[1] * scale);
  if (d == 2) {
    w.u = cx * cy;
    w.n = Vec3(sx * cy, cx * sy, -chi * sx * sy);
  } else {
    const double cz = std::cos(k[2] * scale), sz = std::sin(k[2] * scale);
    w.u = cx * cy * cz + chi * sx * sy * sz;
    w.n = Vec3(sx * cy * cz - chi * cx * sy * sz,
               cx * sy * cz + chi * sx * cy * sz,
               cx * cy * sz - chi * sx * sy * cz);
  }
  if (c == Chirality::minus) w.n[1] = -w.n[1];
  if (b == Branch::B) w.n[1] = -w.n[1];
  return w;
}

// Same content as trigonometric polynomials (exact derivatives, kernel expansion).
struct WeylTrig {
  TrigPoly u;
  std::array<TrigPoly, 3> n;
};

inline WeylTrig weyl_trig(int d, Chirality c, Branch b) {
  check_dim(d);
  const double chi = c == Chirality::plus ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  auto mono = [](double coef, bool sx, bool sy = false, bool sz = false) {
    return TrigMonomial {coef, {sx, sy, sz}};
  };
  WeylTrig w;
  for (auto* p : {&w.u, &w.n[0], &w.n[1], &w.n[2]}) {
    p->d = d;
    p->scale = scale;
  }
  if (d == 1) {
    w.u.terms = {mono(1.0, false)};
    w.n[0].terms = {mono(chi, true)};
    return w;
  }
  double ysign = (c == Chirality::minus ? -1.0 : 1.0) * (b == Branch::B ? -1.0 : 1.0);
  if (d == 2) {
    w.u.terms = {mono(1.0, false, false)};
    w.n[0].terms = {mono(1.0, true, false)};
    w.n[1].terms = {mono(ysign, false, true)};
    w.n[2].terms = {mono(-chi, true, true)};
  } else {
    w.u.terms = {mono(1.0, false, false, false), mono(chi, true, true, true)};
    w.n[0].terms = {mono(1.0, true, false, false), mono(-chi, false, true, true)};
    w.n[1].terms = {mono(ysign, false, true, false), mono(ysign * chi, true, false, true)};
    w.n[2].terms = {mono(1.0, false, false, true), mono(-chi, true, true, false)};
  }
  return w;
}

struct WalkSymbol {
  WaveVector k;
  Mat matrix;
  double u = 1.0;           // Weyl scalar part (Dirac: of the embedded A_k)
  Vec3 ntilde = Vec3::Zero();  // Weyl Pauli vector (Dirac d=1: Pauli vector of the full 2x2 block)
};

inline Mat weyl_matrix(const WeylContent& w) {
  return w.u * pauli(0) - I_ * sigma_dot(w.n);
}

inline WalkSymbol weyl_symbol(const WaveVector& k, const WalkSpec& spec) {
  if (spec.family != Family::weyl) throw InvalidInput("weyl_symbol needs a Weyl spec");
  const WeylContent w = weyl_content(k, spec.dim, spec.chirality, spec.branch);
  return WalkSymbol {k, weyl_matrix(w), w.u, w.n};
}

inline WalkSymbol dirac_symbol(const WaveVector& k, const WalkSpec& spec) {
  if (spec.family != Family::dirac) throw InvalidInput("dirac_symbol needs a Dirac spec");
  spec.validate();
  const double n = spec.n(), m = spec.mass;
  if (spec.dim == 1) {
    if (k.size() != 1) throw InvalidInput("wave-vector dimension mismatch");
    Mat d(2, 2);
    d << n * std::exp(I_ * k[0]), I_ * m,
         I_ * m, n * std::exp(-I_ * k[0]);
    if (spec.branch == Branch::B) d.transposeInPlace();
    const auto pc = pauli_components(I_ * d);  // I d = i u + sigma.n
    return WalkSymbol {k, d, (d.trace() / 2.0).real(), Vec3(pc[0].real(), pc[1].real(), pc[2].real())};
  }
  const WeylContent w = weyl_content(k, spec.dim, spec.chirality, spec.branch);
  const Mat a = weyl_matrix(w);
  const Mat im = I_ * m * Mat::Identity(2, 2);
  return WalkSymbol {k, block2(n * a, im, im, n * a.adjoint()), w.u, w.n};
}

inline WalkSymbol symbol(const WaveVector& k, const WalkSpec& spec) {
  return spec.family == Family::weyl ? weyl_symbol(k, spec) : dirac_symbol(k, spec);
}

// cos(omega) and sin(omega) >= 0 of the two-valued spectrum e^{-+i omega}.
struct Phase {
  double c = 1.0;
  double s = 0.0;
  double omega() const { return std::atan2(s, c); }
};

inline Phase phase(const WaveVector& k, const WalkSpec& spec) {
  spec.validate();
  const WeylContent w = weyl_content(k, spec.dim, spec.chirality, spec.branch);
  const double n = spec.n(), m = spec.m();
  return Phase {n * w.u, std::sqrt(n * n * w.n.squaredNorm() + m * m)};
}

// One omega per conjugate eigenvalue pair: s/2 entries.
inline std::vector<double> dispersion(const WaveVector& k, const WalkSpec& spec) {
  const double w = phase(k, spec).omega();
  return std::vector<double>(static_cast<std::size_t>(spec.components() / 2), w);
}

// H = (omega/sin omega) (i/2)(S - S^dag); exp(-iH) = S.
inline Mat interpolating_hamiltonian(const WaveVector& k, const WalkSpec& spec) {
  const Phase ph = phase(k, spec);
  const double w = ph.omega();
  if (pi - w < 1e-9) throw SingularPoint("interpolating Hamiltonian undefined at omega = pi");
  const Mat s = symbol(k, spec).matrix;
  const double f = w < 1e-6 ? 1.0 + w * w / 6.0 : w / ph.s;
  const Mat h = f * (I_ / 2.0) * (s - s.adjoint());
  return (h + h.adjoint()) / 2.0;
}

// Relativistic limit: (1/sqrt d) sigma.k for Weyl (with the branch's sigma), and
// [[sigma.k/sqrt d, -m], [-m, -sigma.k/sqrt d]] for Dirac (n -> 1).
inline Mat relativistic_hamiltonian(const WaveVector& k, const WalkSpec& spec) {
  spec.validate();
  const double chi = spec.chi();
  if (spec.family == Family::dirac && spec.dim == 1) {
    Mat h(2, 2);
    h << -k[0], -spec.mass,
         -spec.mass, k[0];
    return h;
  }
  Vec3 v = pad3(k) / std::sqrt(static_cast<double>(spec.dim));
  if (spec.dim == 1) v[0] *= chi;
  else {
    if (spec.chirality == Chirality::minus) v[1] = -v[1];
    if (spec.branch == Branch::B) v[1] = -v[1];
  }
  const Mat hw = sigma_dot(v);
  if (spec.family == Family::weyl) return hw;
  const Mat mm = -spec.mass * Mat::Identity(2, 2);
  return block2(hw, mm, mm, -hw);
}

// Chiral representation in which the block form equals
// n u I - i n gamma0 gamma.n + i m gamma0.
inline Mat gamma0() {
  const Mat z = Mat::Zero(2, 2), id = Mat::Identity(2, 2);
  return block2(z, id, id, z);
}
inline Mat gamma(int j) {
  const Mat z = Mat::Zero(2, 2), s = pauli(j);
  return block2(z, -s, s, z);
}

// Walk symbol raised to the n-th power through its spectral projectors:
// S^n = cos(n w) I + sin(n w)/sin(w) (S - cos(w) I), exact for two-valued spectra.
inline Mat symbol_power(const Mat& s, long n, const Phase& ph) {
  const double w = ph.omega();
  const Mat id = Mat::Identity(s.rows(), s.cols());
  if (n == 0) return id;
  const double nd = static_cast<double>(n);
  return std::cos(nd * w) * id + chebyshev_ratio(n, w) * (s - ph.c * id);
}

// Shift relations: symbol(k + v) = factor * partner(k) (or partner(k) * factor).
struct ShiftRelation {
  Vec3 v;
  WalkSpec partner;
  Mat factor;
  bool factor_on_right = true;
};

inline std::vector<ShiftRelation> shift_relations(const WalkSpec& spec) {
  if (spec.family != Family::weyl || spec.dim != 3)
    throw InvalidInput("shift relations are defined for the d=3 Weyl walks");
  const double a = sqrt3 * pi / 2.0;
  const std::array<Vec3, 3> vs {Vec3(a, a, a), Vec3(-a, -a, -a), Vec3(-a, 0.0, 0.0)};
  WalkSpec swapped = spec;
  swapped.chirality = spec.chirality == Chirality::plus ? Chirality::minus : Chirality::plus;
  std::vector<ShiftRelation> out;
  for (int i = 0; i < 3; ++i) {
    ShiftRelation r;
    r.v = vs[static_cast<std::size_t>(i)];
    r.partner = i < 2 ? swapped : spec;
    r.factor = weyl_symbol(r.v, spec).matrix;
    r.factor_on_right = spec.branch == Branch::A;
    out.push_back(r);
  }
  return out;
}

// Binary rotations about the coordinate axes acting on S_+ = {h1..h4}, with
// U_l = i sigma_l in the branch's sigma convention.
struct IsotropyElement {
  std::vector<int> perm;  // image index in S_+
  Mat U;
};

struct IsotropyRep {
  std::vector<Eigen::VectorXi> support;  // S_+ in generator coordinates
  std::vector<IsotropyElement> elements;
};

inline IsotropyRep binary_rotation_rep(const WalkSpec& spec) {
  if (spec.dim != 3 || spec.family != Family::weyl)
    throw InvalidInput("binary-rotation representation is defined for the d=3 Weyl walks");
  IsotropyRep rep;
  rep.support = lattice(3).generator_coords;
  const std::array<std::vector<int>, 4> perms {std::vector<int>{0, 1, 2, 3}, {1, 0, 3, 2},
                                              {2, 3, 0, 1}, {3, 2, 1, 0}};
  for (int l = 0; l < 4; ++l) {
    Mat u = l == 0 ? pauli(0) : Mat(I_ * pauli(l));
    if (spec.chirality == Chirality::minus) u.transposeInPlace();
    if (spec.branch == Branch::B) u = u.conjugate().eval();
    rep.elements.push_back({perms[static_cast<std::size_t>(l)], u});
  }
  return rep;
}

}  // namespace qwalk
