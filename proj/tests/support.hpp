#pragma once

#include <qwalk/lattice.hpp>

#include <random>
#include <vector>

namespace qwalk::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240917ULL);
  return gen;
}

// Uniform in the zone by rejection from its bounding box.
inline WaveVector random_zone_point(int d, std::mt19937_64& gen = rng()) {
  const double half = d == 1 ? pi : std::sqrt(static_cast<double>(d)) * pi;
  std::uniform_real_distribution<double> u(-half, half);
  while (true) {
    WaveVector k(d);
    for (int i = 0; i < d; ++i) k[i] = u(gen);
    if (bz_contains(k)) return k;
  }
}

inline WaveVector random_vector(int d, double scale, std::mt19937_64& gen = rng()) {
  std::normal_distribution<double> n(0.0, scale);
  WaveVector k(d);
  for (int i = 0; i < d; ++i) k[i] = n(gen);
  return k;
}

}  // namespace qwalk::testing
