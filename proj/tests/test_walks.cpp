#include <catch_amalgamated.hpp>

#include <qwalk/walks.hpp>

#include "support.hpp"

#include <Eigen/Eigenvalues>

using namespace qwalk;
using Catch::Approx;

namespace {

std::vector<WalkSpec> all_specs() {
  std::vector<WalkSpec> out;
  for (int d = 1; d <= 3; ++d)
    for (auto c : {Chirality::plus, Chirality::minus})
      for (auto b : {Branch::A, Branch::B}) {
        out.push_back(weyl(d, c, b));
        for (double m : {0.0, 0.1, 0.6, -0.4, 1.0}) out.push_back(dirac(d, m, c, b));
      }
  return out;
}

Mat expm_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXcd ph(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) ph[i] = std::exp(-I_ * es.eigenvalues()[i]);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("Weyl symbol special points") {
  const WalkSymbol s0 = weyl_symbol(Vec3::Zero(), weyl(3));
  CHECK((s0.matrix - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK(s0.u == 1.0);
  CHECK(s0.ntilde.norm() == 0.0);
  for (double kappa : {0.1, 1.0, 2.5, sqrt3 * pi}) {
    const WalkSymbol s = weyl_symbol(Vec3(kappa, 0, 0), weyl(3));
    const double x = kappa / sqrt3;
    const Mat expect = std::cos(x) * pauli(0) - I_ * std::sin(x) * pauli(1);
    CHECK((s.matrix - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(dispersion(Vec3(kappa, 0, 0), weyl(3))[0] - x) <= 1e-14);
  }
}

TEST_CASE("symbols are unitary with u^2 + |n|^2 = 1") {
  auto& gen = testing::rng();
  for (const auto& spec : all_specs())
    for (int t = 0; t < 300; ++t) {
      const WaveVector k = testing::random_zone_point(spec.dim, gen);
      const WalkSymbol s = symbol(k, spec);
      REQUIRE(s.matrix.rows() == spec.components());
      REQUIRE(unitarity_residual(s.matrix) < 1e-12);
      if (!(spec.family == Family::dirac && spec.dim == 1))
        CHECK(std::abs(s.u * s.u + s.ntilde.squaredNorm() - 1.0) < 1e-12);
      // (i/2)(A - A^dag) = sigma.n for the Weyl content
      if (spec.family == Family::weyl) {
        const Mat herm = (I_ / 2.0) * (s.matrix - s.matrix.adjoint());
        CHECK((herm - sigma_dot(s.ntilde)).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
}

TEST_CASE("transpose branch and dimension-1 Dirac block") {
  auto& gen = testing::rng();
  for (int d = 1; d <= 3; ++d)
    for (auto c : {Chirality::plus, Chirality::minus})
      for (int t = 0; t < 200; ++t) {
        const WaveVector k = testing::random_zone_point(d, gen);
        const Mat a = symbol(k, weyl(d, c, Branch::A)).matrix;
        const Mat b = symbol(k, weyl(d, c, Branch::B)).matrix;
        CHECK((a.transpose() - b).cwiseAbs().maxCoeff() < 1e-15);
      }
  WaveVector k(1);
  k << 0.7;
  const double m = 0.6, n = 0.8;
  const Mat d1 = symbol(k, dirac(1, m)).matrix;
  CHECK(std::abs(d1(0, 0) - n * std::exp(I_ * 0.7)) < 1e-15);
  CHECK(std::abs(d1(0, 1) - I_ * m) < 1e-15);
  CHECK(std::abs(d1(1, 1) - n * std::exp(-I_ * 0.7)) < 1e-15);
}

TEST_CASE("Dirac symbol structure") {
  auto& gen = testing::rng();
  const Mat z = Mat::Zero(2, 2);
  for (int t = 0; t < 100; ++t) {
    const WaveVector k = testing::random_zone_point(3, gen);
    const Mat a = symbol(k, weyl(3)).matrix;
    const Mat d0 = symbol(k, dirac(3, 0.0)).matrix;
    CHECK((d0 - block2(a, z, z, a.adjoint())).cwiseAbs().maxCoeff() < 1e-15);
    const Mat d1 = symbol(k, dirac(3, 1.0)).matrix;
    CHECK((d1 - I_ * gamma0()).cwiseAbs().maxCoeff() < 1e-15);
    // m -> -m is a unitary equivalence, not a normalization
    Mat g = Mat::Identity(4, 4);
    g.bottomRightCorner(2, 2) *= -1.0;
    const Mat dp = symbol(k, dirac(3, 0.3)).matrix, dm = symbol(k, dirac(3, -0.3)).matrix;
    CHECK((g * dp * g.adjoint() - dm).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(dirac(3, 1.5), MassOutOfRange);
  WalkSpec bad = weyl(3);
  bad.family = Family::dirac;
  bad.mass = -1.01;
  CHECK_THROWS_AS(symbol(Vec3::Zero(), bad), MassOutOfRange);
}

TEST_CASE("gamma-matrix form agrees with the block form") {
  auto& gen = testing::rng();
  const Mat g0 = gamma0();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const Mat a = mu == 0 ? g0 : gamma(mu), b = nu == 0 ? g0 : gamma(nu);
      const double eta = mu != nu ? 0.0 : (mu == 0 ? 1.0 : -1.0);
      CHECK((a * b + b * a - 2.0 * eta * Mat::Identity(4, 4)).norm() < 1e-15);
    }
  for (int t = 0; t < 100; ++t) {
    const WaveVector k = testing::random_zone_point(3, gen);
    for (double m : {0.0, 0.3, -0.8}) {
      const WalkSpec spec = dirac(3, m);
      const WalkSymbol s = symbol(k, spec);
      const double n = spec.n();
      Mat gn = Mat::Zero(4, 4);
      for (int j = 0; j < 3; ++j) gn += s.ntilde[j] * g0 * gamma(j + 1);
      const Mat form = n * s.u * Mat::Identity(4, 4) - I_ * n * gn + I_ * m * g0;
      CHECK((form - s.matrix).cwiseAbs().maxCoeff() < 1e-14);
      const double w = dispersion(k, spec)[0];
      const Mat h = (w / std::sin(w)) * (n * gn - m * g0);
      CHECK((h - interpolating_hamiltonian(k, spec)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("dispersion matches the spectrum") {
  auto& gen = testing::rng();
  for (const auto& spec : all_specs())
    for (int t = 0; t < 50; ++t) {
      const WaveVector k = testing::random_zone_point(spec.dim, gen);
      const double w = dispersion(k, spec)[0];
      REQUIRE(w >= 0.0);
      REQUIRE(w <= pi);
      Eigen::ComplexEigenSolver<Mat> es(symbol(k, spec).matrix);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx lam = es.eigenvalues()[i];
        const double dist = std::min(std::abs(lam - std::exp(-I_ * w)), std::abs(lam - std::exp(I_ * w)));
        CHECK(dist < 1e-10);
      }
    }
  CHECK(dispersion(Vec3::Zero(), weyl(3))[0] == 0.0);
  CHECK(dispersion(Vec3::Zero(), dirac(3, 0.6))[0] == Approx(std::acos(0.8)).epsilon(1e-15));
  CHECK(dispersion(Vec3::Zero(), dirac(3, 0.6)).size() == 2);
}

TEST_CASE("parity relation and flat dispersion at |m| = 1") {
  auto& gen = testing::rng();
  for (int t = 0; t < 1000; ++t) {
    const WaveVector k = testing::random_zone_point(3, gen);
    CHECK(dispersion(k, weyl(3, Chirality::plus))[0] ==
          Approx(dispersion(-k, weyl(3, Chirality::minus))[0]).margin(1e-13));
    CHECK(std::abs(dispersion(k, dirac(3, 1.0))[0] - pi / 2) <= 1e-12);
    CHECK(std::abs(dispersion(k, dirac(3, -1.0))[0] - pi / 2) <= 1e-12);
  }
}

TEST_CASE("shift relations hold exactly") {
  auto& gen = testing::rng();
  for (auto c : {Chirality::plus, Chirality::minus})
    for (auto b : {Branch::A, Branch::B}) {
      const WalkSpec spec = weyl(3, c, b);
      const auto rels = shift_relations(spec);
      REQUIRE(rels.size() == 3);
      for (const auto& r : rels) {
        REQUIRE(bz_contains(r.v));
        CHECK(unitarity_residual(r.factor) < 1e-15);
        for (int t = 0; t < 1000; ++t) {
          const WaveVector k = testing::random_zone_point(3, gen);
          const Mat lhs = symbol(WaveVector(k + r.v), spec).matrix;
          const Mat p = symbol(k, r.partner).matrix;
          const Mat rhs = r.factor_on_right ? Mat(p * r.factor) : Mat(r.factor * p);
          REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
      // v1 and v2 swap chirality; v3 keeps it.
      CHECK(rels[0].partner.chirality != c);
      CHECK(rels[2].partner.chirality == c);
    }
}

TEST_CASE("interpolating Hamiltonian") {
  auto& gen = testing::rng();
  CHECK(interpolating_hamiltonian(Vec3::Zero(), weyl(3)).norm() == 0.0);
  for (const auto& spec : all_specs()) {
    if (spec.family == Family::dirac && std::abs(spec.mass) == 1.0) continue;
    for (int t = 0; t < 30; ++t) {
      const WaveVector k = testing::random_zone_point(spec.dim, gen);
      const double w = dispersion(k, spec)[0];
      if (pi - w < 1e-3) continue;
      const Mat h = interpolating_hamiltonian(k, spec);
      CHECK((h - h.adjoint()).norm() < 1e-14);
      CHECK((expm_hermitian(h) - symbol(k, spec).matrix).cwiseAbs().maxCoeff() < 1e-10);
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      CHECK(std::abs(std::abs(es.eigenvalues()[0]) - w) < 1e-10);
      if (spec.family == Family::weyl) {
        const WalkSymbol s = symbol(k, spec);
        CHECK((h - sigma_dot(s.ntilde * (w / std::sin(w)))).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
  const Vec3 k = Vec3(1.0, -2.0, 0.5).normalized() * 1e-3;
  const Mat h0 = sigma_dot(k / sqrt3);
  CHECK((interpolating_hamiltonian(k, weyl(3)) - h0).norm() <= 1e-6);
  CHECK((relativistic_hamiltonian(k, weyl(3)) - h0).norm() < 1e-16);
  const double a = sqrt3 * pi / 2;
  CHECK_THROWS_AS(interpolating_hamiltonian(Vec3(-a, -a, -a), weyl(3)), SingularPoint);
}

TEST_CASE("relativistic limit of each spec") {
  auto& gen = testing::rng();
  for (const auto& spec : all_specs()) {
    const WaveVector k = testing::random_vector(spec.dim, 1.0, gen).normalized() * 1e-4;
    Mat h = interpolating_hamiltonian(k, spec);
    Mat h0 = relativistic_hamiltonian(k, spec);
    if (spec.family == Family::dirac) {
      // n -> 1 and the mass term scaled by arcsin(m)/m are the only differences at this order
      const double m = spec.mass;
      if (std::abs(m) == 1.0) continue;
      const double w0 = std::asin(std::abs(m));
      const double f = m == 0.0 ? 1.0 : w0 / std::abs(m);
      const WalkSpec massless = dirac(spec.dim, 0.0, spec.chirality, spec.branch);
      const Mat kin = relativistic_hamiltonian(k, massless);
      h0 = f * spec.n() * kin + (relativistic_hamiltonian(k, spec) - kin) * f;
    }
    CHECK((h - h0).norm() < 1e-6);
  }
}
