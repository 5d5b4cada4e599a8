#include <catch_amalgamated.hpp>

#include <qwalk/io.hpp>

#include "support.hpp"

using namespace qwalk;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("numbers round-trip through their text form") {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(testing::rng()) * std::pow(10.0, i % 7 - 3);
    CHECK(std::stod(io::num(x)) == x);
  }
  CHECK(io::num(0.5) == "0.5");
  CHECK(io::num(std::nan("")) == "nan");
}

TEST_CASE("walk names") {
  CHECK(io::parse_walk("weyl3d+").name() == weyl(3).name());
  const WalkSpec b = io::parse_walk("weyl2d-/B");
  CHECK(b.dim == 2);
  CHECK(b.chirality == Chirality::minus);
  CHECK(b.branch == Branch::B);
  const WalkSpec d = io::parse_walk("dirac1d", 0.4);
  CHECK(d.family == Family::dirac);
  CHECK(d.mass == 0.4);
  CHECK_THROWS_AS(io::parse_walk("dirac3d", 1.5), MassOutOfRange);
  CHECK_THROWS_AS(io::parse_walk("weyl4d+"), InvalidInput);
  CHECK_THROWS_AS(io::parse_walk("weyl3d"), InvalidInput);
  CHECK_THROWS_AS(io::parse_walk("photon"), InvalidInput);
}

TEST_CASE("kernel JSON round trip") {
  const TransitionKernel K = position_kernel(weyl(3));
  const TransitionKernel back = io::kernel_from_json(io::json::parse(io::kernel_to_json(K).dump()));
  REQUIRE(back.terms.size() == K.terms.size());
  for (const auto& [h, a] : K.terms) CHECK((back.terms.at(h) - a).norm() == 0.0);
  CHECK(check_unitarity_conditions(back).pass);

  io::json tampered = io::kernel_to_json(K);
  tampered["terms"][0]["matrix"][0][0][0] = 1.01 * tampered["terms"][0]["matrix"][0][0][0].get<double>() + 0.01;
  CHECK_FALSE(check_unitarity_conditions(io::kernel_from_json(tampered)).pass);

  io::json bad = io::kernel_to_json(K);
  bad["terms"][0]["displacement"] = {1, 0};
  CHECK_THROWS_AS(io::kernel_from_json(bad), InvalidInput);
  CHECK_THROWS_AS(io::kernel_from_json(io::json::parse(R"({"d":3})")), InvalidInput);
}

TEST_CASE("CSV tables carry a column header") {
  const WalkSpec spec = dirac(1, 0.4);
  PacketParams pp;
  pp.k0 = WaveVector::Constant(1, 0.1);
  pp.sigma = 4.0;
  pp.x0 = Eigen::VectorXd::Constant(1, 16.0);
  const FieldState st = make_packet(pp, 64, spec);

  std::ostringstream s1, s2;
  io::write_state_csv(s1, st);
  CHECK(s1.str().rfind("site_0,component,re,im\n", 0) == 0);
  CHECK(count_lines(s1.str()) == 1 + 64 * 2);
  io::write_marginal_csv(s2, st);
  CHECK(s2.str().rfind("site_0,p\n", 0) == 0);
  CHECK(count_lines(s2.str()) == 65);

  std::ostringstream s3;
  io::write_trajectory_csv(s3, packet_trajectory(st, spec, packet_model(pp.k0, spec), 4, 2), 1);
  CHECK(s3.str().rfind("step,mean_x0,var_x0,fidelity_vs_reference\n", 0) == 0);
  CHECK(count_lines(s3.str()) == 4);

  std::ostringstream s4;
  OrbitFamily fam;
  fam.parameters = {0.0, 1.0};
  io::write_orbit_csv(s4, orbit(Vec3(0.05, 0, 0), fam, default_fmap(), weyl(3)));
  CHECK(s4.str().rfind("parameter,k_x,k_y,k_z,omega,region,escaped\n", 0) == 0);
  CHECK(count_lines(s4.str()) == 3);

  CHECK(io::csv_preamble("verify", {{"walk", "weyl3d+"}}) == "# qwalk 0.1.0 command=verify walk=weyl3d+\n");
}

TEST_CASE("JSON reports") {
  const GroupPresentation p = builtin_presentation("z2");
  const io::json b = io::ball_to_json(build_ball(p, 3), p);
  CHECK(b["vertices"].size() == 25);
  CHECK(b["edges"].size() == 36);
  CHECK(b["identification_complete"] == true);

  const io::json c = io::comparison_to_json(200, Comparison {0.9, 0.1, 0.01}, {{"mass", 0.4}});
  CHECK(c["steps"] == 200);
  CHECK(c["l1"] == 0.01);

  const io::json m = io::meta("fock", {{"M", "8"}});
  CHECK(m["version"] == "0.1.0");
  CHECK(m["config"]["M"] == "8");
}
