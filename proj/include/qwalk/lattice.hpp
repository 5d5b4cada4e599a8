#pragma once

#include "core.hpp"

#include <vector>

namespace qwalk {

// Generator basis {h_j} (columns, Cartesian) and its dual b_i with b_i.h_j = 2 pi delta_ij.
// Positions are integer coordinates in the generator basis.
struct Lattice {
  int d = 3;
  Eigen::MatrixXd basis;
  Eigen::MatrixXd reciprocal;
  std::vector<WaveVector> generators;  // S_+ in Cartesian coordinates
  std::vector<Eigen::VectorXi> generator_coords;  // S_+ in basis coordinates

  WaveVector cartesian(const Eigen::VectorXi& n) const { return basis * n.cast<double>(); }
};

inline void check_dim(int d) {
  if (d < 1 || d > 3) throw InvalidInput("dimension must be 1, 2 or 3");
}

inline Lattice make_lattice(int d) {
  check_dim(d);
  Lattice L;
  L.d = d;
  L.basis.resize(d, d);
  if (d == 1) {
    L.basis << 1.0;
    L.generators = {L.basis.col(0)};
    L.generator_coords = {Eigen::VectorXi::Constant(1, 1)};
  } else if (d == 2) {
    L.basis << 1.0, 1.0,
               1.0, -1.0;
    L.basis /= sqrt2;
    for (int j = 0; j < 2; ++j) {
      L.generators.push_back(L.basis.col(j));
      Eigen::VectorXi e = Eigen::VectorXi::Zero(2);
      e[j] = 1;
      L.generator_coords.push_back(e);
    }
  } else {
    L.basis << 1.0, 1.0, -1.0,
               1.0, -1.0, 1.0,
               1.0, -1.0, -1.0;
    L.basis /= sqrt3;
    for (int j = 0; j < 3; ++j) {
      L.generators.push_back(L.basis.col(j));
      Eigen::VectorXi e = Eigen::VectorXi::Zero(3);
      e[j] = 1;
      L.generator_coords.push_back(e);
    }
    L.generators.push_back(-(L.basis.col(0) + L.basis.col(1) + L.basis.col(2)));
    L.generator_coords.push_back(Eigen::VectorXi::Constant(3, -1));
  }
  L.reciprocal = 2.0 * pi * L.basis.transpose().inverse();
  return L;
}

inline const Lattice& lattice(int d) {
  static const Lattice l1 = make_lattice(1), l2 = make_lattice(2), l3 = make_lattice(3);
  check_dim(d);
  return d == 1 ? l1 : (d == 2 ? l2 : l3);
}

inline bool bz_contains(const WaveVector& k, double tol = 1e-12) {
  const auto d = static_cast<int>(k.size());
  check_dim(d);
  if (!k.allFinite()) return false;
  if (d == 1) return std::abs(k[0]) <= pi + tol;
  const double bound = std::sqrt(static_cast<double>(d)) * pi + tol;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(k[i] + k[j]) > bound || std::abs(k[i] - k[j]) > bound) return false;
  return true;
}

// Closest-reciprocal-point reduction. Ties prefer the shortest shift, so the map is idempotent.
inline WaveVector bz_wrap(const WaveVector& k) {
  const auto d = static_cast<int>(k.size());
  const Lattice& L = lattice(d);
  if (!k.allFinite()) throw InvalidInput("non-finite wave-vector");
  const WaveVector frac = L.basis.transpose() * k / (2.0 * pi);
  const Eigen::VectorXd base = frac.array().round().matrix();
  WaveVector best = k;
  double best_n2 = k.squaredNorm();
  double best_shift = 0.0;
  Eigen::VectorXi off = Eigen::VectorXi::Constant(d, -2);
  while (true) {
    const WaveVector shift = L.reciprocal * (base + off.cast<double>());
    const WaveVector cand = k - shift;
    const double n2 = cand.squaredNorm();
    const double tol = 1e-12 * std::max(1.0, best_n2);
    const double s2 = shift.squaredNorm();
    if (n2 < best_n2 - tol || (n2 <= best_n2 + tol && s2 < best_shift - 1e-9)) {
      best = cand;
      best_n2 = n2;
      best_shift = s2;
    }
    int i = 0;
    while (i < d && ++off[i] > 2) off[i++] = -2;
    if (i == d) break;
  }
  return best;
}

struct MomentumGrid {
  int N = 0;
  int d = 0;
  std::vector<WaveVector> points;  // row-major in the grid index, first axis slowest
};

inline WaveVector grid_point(const Lattice& L, int N, const Eigen::VectorXi& m) {
  return L.reciprocal * (m.cast<double>() / static_cast<double>(N));
}

inline MomentumGrid momentum_grid(int N, int d) {
  if (N < 2) throw InvalidInput("momentum grid needs N >= 2");
  const Lattice& L = lattice(d);
  MomentumGrid g;
  g.N = N;
  g.d = d;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
  g.points.reserve(total);
  Eigen::VectorXi m(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = d - 1; i >= 0; --i) {
      m[i] = static_cast<int>(r % static_cast<std::size_t>(N));
      r /= static_cast<std::size_t>(N);
    }
    g.points.push_back(grid_point(L, N, m));
  }
  return g;
}

}  // namespace qwalk
