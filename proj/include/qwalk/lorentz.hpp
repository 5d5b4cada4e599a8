#pragma once

#include "lattice.hpp"
#include "walks.hpp"

#include <array>
#include <functional>
#include <vector>

namespace qwalk {

using FourVector = Eigen::Vector4d;  // (time, x, y, z)
using Lorentz4 = Eigen::Matrix4d;

// n(k) = (sin omega, n~(k)); for Dirac walks the space part is n n~ and the null condition fails.
inline FourVector n_of_k(const WaveVector& k, const WalkSpec& spec) {
  const Phase ph = phase(k, spec);
  const WeylContent w = weyl_content(k, spec.dim, spec.chirality, spec.branch);
  FourVector n;
  n << ph.s, spec.n() * w.n;
  return n;
}

inline double minkowski_square(const FourVector& p) { return p[0] * p[0] - p.tail<3>().squaredNorm(); }

// Weight f as a function of the local dispersion, with its derivative.
struct FMap {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

inline FMap default_fmap() {
  return FMap {[](double w) { return w < 1e-4 ? 1.0 + w * w / 6.0 : w / std::sin(w); },
               [](double w) {
                 if (w < 1e-4) return w / 3.0;
                 const double s = std::sin(w);
                 return (s - w * std::cos(w)) / (s * s);
               }};
}

inline FMap unit_fmap() {
  return FMap {[](double) { return 1.0; }, [](double) { return 0.0; }};
}

inline const std::array<Vec3, 4>& region_centers() {
  static const double a = sqrt3 * pi / 2.0;
  static const std::array<Vec3, 4> c {Vec3::Zero(), Vec3(a, a, a), Vec3(-a, -a, -a), Vec3(-a, 0.0, 0.0)};
  return c;
}

// Nearest center under the zone-wrapped distance; ties go to the lowest index.
inline int classify_region(const Vec3& k) {
  const auto& c = region_centers();
  int best = 0;
  double best_d = bz_wrap(WaveVector(k - c[0])).norm();
  for (int i = 1; i < 4; ++i) {
    const double d = bz_wrap(WaveVector(k - c[static_cast<std::size_t>(i)])).norm();
    if (d < best_d - 1e-12) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

// Walk whose symbol at q gives the local content near center i.
inline WalkSpec region_spec(int region, const WalkSpec& spec) {
  if (spec.family != Family::weyl || spec.dim != 3)
    throw InvalidInput("the relativity layer is defined for the d=3 Weyl walks");
  if (region < 0 || region > 3) throw InvalidInput("region index must be 0..3");
  WalkSpec local = spec;
  if (region == 1 || region == 2)
    local.chirality = spec.chirality == Chirality::plus ? Chirality::minus : Chirality::plus;
  return local;
}

inline Vec3 region_offset(const Vec3& k, int region) {
  return bz_wrap(WaveVector(k - region_centers()[static_cast<std::size_t>(region)]));
}

struct LocalMap {
  FourVector p;
  Eigen::Matrix3d jacobian;  // d p_space / d q
  double omega = 0.0;        // local dispersion
};

// p = f(w) (sin w, n~(q)) in region coordinates, with its analytic space Jacobian.
inline LocalMap dmap_local(const Vec3& q, int region, const FMap& f, const WalkSpec& spec) {
  const WalkSpec local = region_spec(region, spec);
  const WeylTrig t = weyl_trig(3, local.chirality, local.branch);
  const double u = t.u.value(q);
  Vec3 nt;
  Eigen::Matrix3d jn;
  for (int i = 0; i < 3; ++i) {
    nt[i] = t.n[static_cast<std::size_t>(i)].value(q);
    jn.row(i) = t.n[static_cast<std::size_t>(i)].gradient(q).transpose();
  }
  const double s = nt.norm();
  const double w = std::atan2(s, u);
  const double F = f.f(w);
  LocalMap m;
  m.omega = w;
  m.p << F * s, F * nt;
  m.jacobian = F * jn;
  if (s > 1e-14) {
    const Eigen::Vector3d grad_s = jn.transpose() * nt / s;
    const Eigen::Vector3d grad_w = u * grad_s - s * t.u.gradient(q);
    m.jacobian += f.df(w) * nt * grad_w.transpose();
  }
  return m;
}

inline FourVector dmap(const Vec3& k, const FMap& f, const WalkSpec& spec) {
  const int r = classify_region(k);
  return dmap_local(region_offset(k, r), r, f, spec).p;
}

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-15;  // iterate to round-off; backtracking stops once no step improves
  double accept = 1e-10;
};

// Solves p_space(q) = target near center `region`; returns the zone point c_i + q.
inline Vec3 dmap_invert(const FourVector& p, int region, const FMap& f, const WalkSpec& spec,
                        const NewtonOptions& opt = {}) {
  const Vec3 target = p.tail<3>();
  if (!target.allFinite()) throw InvalidInput("non-finite four-vector");
  const Eigen::Matrix3d j0 = dmap_local(Vec3::Zero(), region, f, spec).jacobian;
  Vec3 q = j0.fullPivLu().solve(target);
  auto residual = [&](const Vec3& x) { return Vec3(dmap_local(x, region, f, spec).p.tail<3>() - target); };
  Vec3 r = residual(q);
  double rn = r.norm();
  for (int it = 0; it < opt.max_iterations && rn > opt.tolerance; ++it) {
    const LocalMap m = dmap_local(q, region, f, spec);
    const Vec3 step = m.jacobian.fullPivLu().solve(r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, lambda /= 2.0) {
      const Vec3 cand = q - lambda * step;
      const Vec3 rc = residual(cand);
      if (rc.norm() < rn) {
        q = cand;
        r = rc;
        rn = rc.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(rn <= opt.accept)) throw NonConvergence("four-vector is outside the image of the region");
  const Vec3 k = bz_wrap(WaveVector(region_centers()[static_cast<std::size_t>(region)] + q));
  if (classify_region(k) != region) throw RegionViolation("inverse image lies outside the region");
  return k;
}

// Active boost: beta parallel to p increases |p|.
inline Lorentz4 boost_matrix(const Vec3& beta) {
  const double b = beta.norm();
  if (!(b < 1.0)) throw InvalidInput("boost speed must satisfy |beta| < 1");
  Lorentz4 L = Lorentz4::Identity();
  if (b == 0.0) return L;
  const double g = 1.0 / std::sqrt(1.0 - b * b);
  const Vec3 e = beta / b;
  L(0, 0) = g;
  L.block<1, 3>(0, 1) = g * beta.transpose();
  L.block<3, 1>(1, 0) = g * beta;
  L.block<3, 3>(1, 1) = Eigen::Matrix3d::Identity() + (g - 1.0) * e * e.transpose();
  return L;
}

inline Vec3 rapidity_to_beta(const Vec3& direction, double rapidity) {
  if (direction.norm() == 0.0) throw InvalidInput("boost direction must be nonzero");
  return std::tanh(rapidity) * direction.normalized();
}

inline Lorentz4 rotation_matrix(const Vec3& axis, double angle) {
  if (axis.norm() == 0.0) throw InvalidInput("rotation axis must be nonzero");
  Lorentz4 L = Lorentz4::Identity();
  L.block<3, 3>(1, 1) = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return L;
}

// D^{-1} L D within the region of k.
inline Vec3 nonlinear_transform(const Vec3& k, const Lorentz4& L, const FMap& f, const WalkSpec& spec,
                                const NewtonOptions& opt = {}) {
  const int r = classify_region(k);
  const FourVector p = dmap_local(region_offset(k, r), r, f, spec).p;
  return dmap_invert(L * p, r, f, spec, opt);
}

inline Vec3 nonlinear_boost(const Vec3& k, const Vec3& beta, const FMap& f, const WalkSpec& spec) {
  return nonlinear_transform(k, boost_matrix(beta), f, spec);
}

// |f(w') sin w' - p'_0| at the image point: the time component is not used by the inversion.
inline double shell_residual(const Vec3& k, const Lorentz4& L, const FMap& f, const WalkSpec& spec) {
  const int r = classify_region(k);
  const FourVector pp = L * dmap_local(region_offset(k, r), r, f, spec).p;
  const Vec3 kk = nonlinear_transform(k, L, f, spec);
  return std::abs(dmap_local(region_offset(kk, r), r, f, spec).p[0] - pp[0]);
}

struct OrbitFamily {
  enum class Kind { rotation, boost } kind = Kind::rotation;
  Vec3 axis = Vec3::UnitZ();  // rotation axis or boost direction
  std::vector<double> parameters;  // angles or rapidities
};

struct OrbitPoint {
  double parameter = 0.0;
  Vec3 k = Vec3::Zero();
  double omega = 0.0;
  int region = 0;
  bool escaped = false;  // marker row: the transform left the region image
};

// Orbit of k0; the first escape is recorded as a marker row and ends the orbit.
inline std::vector<OrbitPoint> orbit(const Vec3& k0, const OrbitFamily& fam, const FMap& f, const WalkSpec& spec) {
  if (!bz_contains(k0)) throw InvalidInput("orbit seed must lie in the zone");
  std::vector<OrbitPoint> out;
  for (double t : fam.parameters) {
    const Lorentz4 L = fam.kind == OrbitFamily::Kind::rotation ? rotation_matrix(fam.axis, t)
                                                               : boost_matrix(rapidity_to_beta(fam.axis, t));
    OrbitPoint pt;
    pt.parameter = t;
    try {
      pt.k = nonlinear_transform(k0, L, f, spec);
      pt.omega = phase(pt.k, spec).omega();
      pt.region = classify_region(pt.k);
      out.push_back(pt);
    } catch (const NonConvergence&) {
      pt.escaped = true;
    } catch (const RegionViolation&) {
      pt.escaped = true;
    }
    if (pt.escaped) {
      pt.k = Vec3::Constant(std::nan(""));
      pt.omega = std::nan("");
      pt.region = -1;
      out.push_back(pt);
      break;
    }
  }
  return out;
}

}  // namespace qwalk
