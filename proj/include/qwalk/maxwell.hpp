#pragma once

#include "analysis.hpp"
#include "walks.hpp"

#include <Eigen/Eigenvalues>

namespace qwalk {

// Photon wave-vectors are in lattice units (generators (+-1,+-1,+-1)); the Weyl helicity
// vector at k/2 is evaluated at the library point sqrt3 k / 2.
inline Vec3 photon_half_point(const Vec3& k) {
  const Vec3 q = sqrt3 * k / 2.0;
  if (!bz_contains(q)) throw InvalidInput("k/2 lies outside the zone");
  return q;
}

inline void check_photon_spec(const WalkSpec& spec) {
  if (spec.family != Family::weyl || spec.dim != 3) throw InvalidInput("photons are built from the d=3 Weyl walks");
}

// Helicity vector n_{k/2} = (omega/sin omega) n~, of length omega.
inline Vec3 helicity_vector(const Vec3& k, const WalkSpec& spec) {
  check_photon_spec(spec);
  const Vec3 q = photon_half_point(k);
  const WeylContent w = weyl_content(q, 3, spec.chirality, spec.branch);
  const double s = w.n.norm();
  const double om = std::atan2(s, w.u);
  const double f = om < 1e-6 ? 1.0 + om * om / 6.0 : om / s;
  return f * w.n;
}

// omega(k) = 2 |n_{k/2}|.
inline double photon_dispersion(const Vec3& k, const WalkSpec& spec) {
  return 2.0 * helicity_vector(k, spec).norm();
}

inline Vec3 photon_group_velocity(const Vec3& k, const WalkSpec& spec) {
  check_photon_spec(spec);
  return sqrt3 * group_velocity(photon_half_point(k), spec);
}

// |grad omega| normalized by its k -> 0 value, which is 1 in these units.
inline double vacuum_speed(double k_magnitude, const Vec3& direction, const WalkSpec& spec) {
  if (direction.norm() == 0.0) throw InvalidInput("direction must be nonzero");
  return photon_group_velocity(Vec3(k_magnitude * direction.normalized()), spec).norm();
}

struct SpeedFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through (k, c(k) - 1) on a uniform grid.
inline SpeedFit vacuum_speed_slope(const Vec3& direction, const WalkSpec& spec, double kmin = 1e-3,
                                   double kmax = 1e-2, int points = 10) {
  if (points < 2 || !(kmax > kmin)) throw InvalidInput("slope fit needs an increasing range and two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < points; ++i) {
    const double k = kmin + (kmax - kmin) * i / (points - 1);
    const double y = vacuum_speed(k, direction, spec) - 1.0;
    sx += k, sy += y, sxx += k * k, sxy += k * y;
  }
  const double n = points;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return SpeedFit {slope, (sy - slope * sx) / n};
}

struct PolarizationFrame {
  Vec3 k;
  Vec3 n_hat;  // helicity direction at k/2
  Vec3 u1;
  Vec3 u2;
  double tilt_helicity = 0.0;  // angle between 2 n_{k/2} and k
  double tilt_velocity = 0.0;  // angle between grad omega and k
};

inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline PolarizationFrame polarization_frame(const Vec3& k, const WalkSpec& spec) {
  const Vec3 n = helicity_vector(k, spec);
  if (n.norm() < 1e-14) throw InvalidInput("helicity vector vanishes: no polarization plane");
  PolarizationFrame fr;
  fr.k = k;
  fr.n_hat = n.normalized();
  Eigen::Index e = 0;
  fr.n_hat.cwiseAbs().minCoeff(&e);
  fr.u1 = Vec3::Unit(e).cross(fr.n_hat).normalized();
  fr.u2 = fr.n_hat.cross(fr.u1);
  fr.tilt_helicity = angle_between(n, k);
  fr.tilt_velocity = angle_between(photon_group_velocity(k, spec), k);
  return fr;
}

// Largest deviation from u.n = 0, u1.u2 = 0, |u| = 1, (u1 x u2).n = 1.
inline double frame_residual(const PolarizationFrame& f) {
  Eigen::Matrix3d m;
  m << f.u1, f.u2, f.n_hat;
  const double gram = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return std::max(gram, std::abs(f.u1.cross(f.u2).dot(f.n_hat) - 1.0));
}

// Spin-1 generators (J_i)_{jk} = -i eps_{ijk}.
inline Eigen::Matrix3cd spin1(int i) {
  Eigen::Matrix3cd j = Eigen::Matrix3cd::Zero();
  const int a = (i + 1) % 3, b = (i + 2) % 3;
  j(a, b) = -I_;
  j(b, a) = I_;
  return j;
}

// exp(-i 2 n_{k/2}.J t) through the eigenbasis of the Hermitian generator.
inline Eigen::Matrix3cd maxwell_propagator(const Vec3& k, double t, const WalkSpec& spec) {
  const Vec3 n = helicity_vector(k, spec);
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  for (int i = 0; i < 3; ++i) g += 2.0 * n[i] * spin1(i);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(g);
  Eigen::Vector3cd ph;
  for (int i = 0; i < 3; ++i) ph[i] = std::exp(-I_ * (es.eigenvalues()[i] * t));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// SI values of c and hbar.
inline constexpr double speed_of_light = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;

struct PlanckUnits {
  double a = 0.0;  // length
  double t = 0.0;  // time
  double m = 0.0;  // mass
};

enum class PlanckAnchor { length, time, mass };

inline PlanckUnits planck_units(PlanckAnchor anchor, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw InvalidInput("Planck anchor must be positive");
  PlanckUnits u;
  switch (anchor) {
    case PlanckAnchor::length: u.a = value; break;
    case PlanckAnchor::time: u.a = speed_of_light * value; break;
    case PlanckAnchor::mass: u.a = hbar / (value * speed_of_light); break;
  }
  u.t = u.a / speed_of_light;
  u.m = hbar / (u.a * speed_of_light);
  if (anchor == PlanckAnchor::time) u.t = value;
  if (anchor == PlanckAnchor::mass) u.m = value;
  return u;
}

// m_* from the vacuum-dispersion slope: (1/sqrt3) k hbar / ((c(k) - c(0)) a c), k in lattice units.
inline double planck_mass_estimate(double k, double c_k, double c_0, double a_star) {
  if (!(a_star > 0.0)) throw InvalidInput("lattice length must be positive");
  const double dc = c_k - c_0;
  if (dc == 0.0) throw InvalidInput("no vacuum dispersion: the estimator is undefined");
  return std::abs(k / sqrt3 * hbar / (a_star * speed_of_light) / dc);
}

}  // namespace qwalk
