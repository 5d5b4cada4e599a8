#include <catch_amalgamated.hpp>

#include <qwalk/walks.hpp>

#include "support.hpp"

#include <set>

using namespace qwalk;
using Catch::Approx;

TEST_CASE("zone membership uses the closed BCC inequalities") {
  CHECK(bz_contains(Vec3(0, 0, 0)));
  CHECK_FALSE(bz_contains(Vec3(sqrt3 * pi, sqrt3 * pi, 0)));
  CHECK(bz_contains(Vec3(pi / 2, pi / 2, pi / 2)));
  CHECK(bz_contains(Vec3(sqrt3 * pi / 2, sqrt3 * pi / 2, sqrt3 * pi / 2)));  // boundary accepted
  WaveVector k1(1);
  k1 << pi;
  CHECK(bz_contains(k1));
  k1 << pi + 1e-6;
  CHECK_FALSE(bz_contains(k1));
  WaveVector k2(2);
  k2 << sqrt2 * pi * 0.5, sqrt2 * pi * 0.5;
  CHECK(bz_contains(k2));
  k2 << sqrt2 * pi * 0.6, sqrt2 * pi * 0.5;
  CHECK_FALSE(bz_contains(k2));
}

TEST_CASE("generator and reciprocal bases are dual") {
  for (int d = 1; d <= 3; ++d) {
    const Lattice& L = lattice(d);
    const Eigen::MatrixXd prod = L.reciprocal.transpose() * L.basis;
    CHECK((prod - 2.0 * pi * Eigen::MatrixXd::Identity(d, d)).norm() < 1e-13);
    for (const auto& h : L.generators) CHECK(h.norm() == Approx(1.0).epsilon(1e-15));
  }
  const Lattice& L = lattice(3);
  WaveVector sum = WaveVector::Zero(3);
  for (const auto& h : L.generators) sum += h;
  CHECK(sum.norm() == 0.0);
}

TEST_CASE("bz_wrap lands in the zone, shifts by reciprocal vectors and is idempotent") {
  auto& gen = testing::rng();
  for (int d = 1; d <= 3; ++d) {
    const Lattice& L = lattice(d);
    for (int t = 0; t < 10000; ++t) {
      const WaveVector k = testing::random_vector(d, 8.0, gen);
      const WaveVector w = bz_wrap(k);
      REQUIRE(bz_contains(w, 1e-9));
      const Eigen::VectorXd coeff = L.basis.transpose() * (k - w) / (2.0 * pi);
      CHECK((coeff - coeff.array().round().matrix()).norm() < 1e-9);
      CHECK((bz_wrap(w) - w).norm() < 1e-12);
    }
  }
  // k = 0 shifted by a reciprocal basis vector
  const Lattice& L = lattice(3);
  CHECK(bz_wrap(L.reciprocal.col(1)).norm() < 1e-12);
}

TEST_CASE("closed-form symbols are periodic under the reciprocal lattice") {
  auto& gen = testing::rng();
  for (int d = 1; d <= 3; ++d) {
    const WalkSpec specs[] = {weyl(d), weyl(d, Chirality::minus, Branch::B), dirac(d, 0.6)};
    for (const auto& spec : specs)
      for (int t = 0; t < 1000; ++t) {
        const WaveVector k = testing::random_vector(d, 8.0, gen);
        const Mat a = symbol(k, spec).matrix, b = symbol(bz_wrap(k), spec).matrix;
        REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(dispersion(k, spec)[0] == Approx(dispersion(bz_wrap(k), spec)[0]).margin(1e-12));
      }
  }
}

TEST_CASE("momentum grid") {
  const MomentumGrid g = momentum_grid(2, 1);
  REQUIRE(g.points.size() == 2);
  CHECK(g.points[0][0] == 0.0);
  CHECK(g.points[1][0] == Approx(pi));
  for (int N : {3, 4, 5}) {
    const MomentumGrid g3 = momentum_grid(N, 3);
    REQUIRE(g3.points.size() == static_cast<std::size_t>(N * N * N));
    std::set<std::vector<long long>> distinct;
    for (const auto& k : g3.points) {
      const WaveVector w = bz_wrap(k);
      distinct.insert({std::llround(w[0] * 1e9), std::llround(w[1] * 1e9), std::llround(w[2] * 1e9)});
      CHECK(dispersion(k, weyl(3))[0] == Approx(dispersion(w, weyl(3))[0]).margin(1e-12));
    }
    CHECK(distinct.size() == g3.points.size());
    CHECK(g3.points[0].norm() == 0.0);
  }
  CHECK_THROWS_AS(momentum_grid(1, 2), InvalidInput);
}
