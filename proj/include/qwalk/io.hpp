#pragma once

#include "analysis.hpp"
#include "cayley.hpp"
#include "fock.hpp"
#include "kernel.hpp"
#include "lorentz.hpp"

#include <json.hpp>

#include <charconv>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qwalk::io {

inline constexpr const char* version = "0.1.0";

using json = nlohmann::ordered_json;

// Ordered key=value echo of the effective configuration.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip decimal form; identical inputs give identical bytes.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// First line of every CSV: version, command and the configuration echo.
inline std::string csv_preamble(const std::string& command, const ConfigEcho& config) {
  std::string s = std::string("# qwalk ") + version + " command=" + command;
  for (const auto& [k, v] : config) s += " " + k + "=" + v;
  return s + "\n";
}

inline json meta(const std::string& command, const ConfigEcho& config) {
  json c = json::object();
  for (const auto& [k, v] : config) c[k] = v;
  return json {{"version", version}, {"command", command}, {"config", c}};
}

// ---------------------------------------------------------------------------------------------
// Walk names: weyl{1,2,3}d{+,-}[/B], dirac{1,2,3}d[{+,-}][/B].

inline WalkSpec parse_walk(const std::string& name, double mass = 0.0) {
  std::string s = name;
  WalkSpec spec;
  auto fail = [&]() { throw InvalidInput("unknown walk name: " + name); };
  if (s.size() >= 2 && s.substr(s.size() - 2) == "/B") {
    spec.branch = Branch::B;
    s.resize(s.size() - 2);
  }
  if (s.rfind("weyl", 0) == 0) {
    spec.family = Family::weyl;
    s = s.substr(4);
  } else if (s.rfind("dirac", 0) == 0) {
    spec.family = Family::dirac;
    s = s.substr(5);
  } else {
    fail();
  }
  if (s.size() < 2 || s[1] != 'd' || s[0] < '1' || s[0] > '3') fail();
  spec.dim = s[0] - '0';
  s = s.substr(2);
  if (s == "+" || (s.empty() && spec.family == Family::dirac)) spec.chirality = Chirality::plus;
  else if (s == "-") spec.chirality = Chirality::minus;
  else fail();
  spec.mass = spec.family == Family::dirac ? mass : 0.0;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------------------------
// Transition kernels: {d, s, terms: [{displacement: [int; d], matrix: [[[re, im]; s]; s]}]}.

inline json kernel_to_json(const TransitionKernel& K) {
  json terms = json::array();
  for (const auto& [h, a] : K.terms) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
      rows.push_back(row);
    }
    terms.push_back({{"displacement", h}, {"matrix", rows}});
  }
  return json {{"d", K.d}, {"s", K.s}, {"terms", terms}};
}

inline TransitionKernel kernel_from_json(const json& j) {
  try {
    TransitionKernel K;
    K.d = j.at("d").get<int>();
    K.s = j.at("s").get<int>();
    check_dim(K.d);
    if (K.s < 1) throw InvalidInput("kernel component count must be positive");
    for (const auto& t : j.at("terms")) {
      const auto h = t.at("displacement").get<Displacement>();
      if (static_cast<int>(h.size()) != K.d) throw InvalidInput("displacement length differs from d");
      const auto& rows = t.at("matrix");
      if (static_cast<int>(rows.size()) != K.s) throw InvalidInput("matrix row count differs from s");
      Mat a(K.s, K.s);
      for (int r = 0; r < K.s; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (static_cast<int>(row.size()) != K.s) throw InvalidInput("matrix column count differs from s");
        for (int c = 0; c < K.s; ++c) {
          const auto& z = row.at(static_cast<std::size_t>(c));
          if (z.size() != 2) throw InvalidInput("matrix entries are [re, im] pairs");
          a(r, c) = cplx {z.at(0).get<double>(), z.at(1).get<double>()};
        }
      }
      if (!K.terms.emplace(h, a).second) throw InvalidInput("duplicate displacement in kernel");
    }
    return K;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed kernel JSON: ") + e.what());
  }
}

inline json unitarity_to_json(const UnitarityReport& rep) {
  json conds = json::array();
  for (const auto& c : rep.conditions)
    conds.push_back({{"name", c.name}, {"displacement", c.displacement}, {"residual", c.residual}});
  return json {{"pass", rep.pass}, {"max_residual", rep.max_residual}, {"conditions", conds}};
}

// ---------------------------------------------------------------------------------------------
// CSV tables.

inline void write_state_csv(std::ostream& os, const FieldState& st) {
  for (int i = 0; i < st.d; ++i) os << "site_" << i << ",";
  os << "component,re,im\n";
  const auto s = static_cast<std::size_t>(st.s);
  for (std::size_t site = 0; site < st.sites(); ++site) {
    const Eigen::VectorXi n = st.site_coords(site);
    for (std::size_t c = 0; c < s; ++c) {
      const cplx a = st.amp[site * s + c];
      for (int i = 0; i < st.d; ++i) os << n[i] << ",";
      os << c << "," << num(a.real()) << "," << num(a.imag()) << "\n";
    }
  }
}

inline void write_marginal_csv(std::ostream& os, const FieldState& st) {
  for (int i = 0; i < st.d; ++i) os << "site_" << i << ",";
  os << "p\n";
  const Observables o = observables(st);
  for (std::size_t site = 0; site < st.sites(); ++site) {
    const Eigen::VectorXi n = st.site_coords(site);
    for (int i = 0; i < st.d; ++i) os << n[i] << ",";
    os << num(o.marginal[site]) << "\n";
  }
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows, int d) {
  os << "step";
  for (int i = 0; i < d; ++i) os << ",mean_x" << i;
  for (int i = 0; i < d; ++i) os << ",var_x" << i;
  os << ",fidelity_vs_reference\n";
  for (const auto& r : rows) {
    os << r.step;
    for (int i = 0; i < d; ++i) os << "," << num(r.mean[i]);
    for (int i = 0; i < d; ++i) os << "," << num(r.variance[i]);
    os << "," << num(r.fidelity) << "\n";
  }
}

inline void write_orbit_csv(std::ostream& os, const std::vector<OrbitPoint>& pts) {
  os << "parameter,k_x,k_y,k_z,omega,region,escaped\n";
  for (const auto& p : pts)
    os << num(p.parameter) << "," << num(p.k[0]) << "," << num(p.k[1]) << "," << num(p.k[2]) << "," << num(p.omega)
       << "," << p.region << "," << (p.escaped ? 1 : 0) << "\n";
}

// Dispersion scan rows: wave-vector, all eigenphases.
inline void write_dispersion_csv(std::ostream& os, const std::vector<WaveVector>& ks, const WalkSpec& spec) {
  for (int i = 0; i < spec.dim; ++i) os << "k_" << i << ",";
  os << "omega\n";
  for (const auto& k : ks) {
    for (int i = 0; i < spec.dim; ++i) os << num(k[i]) << ",";
    os << num(phase(k, spec).omega()) << "\n";
  }
}

struct SpeedRow {
  double k = 0.0;
  std::string direction;
  double omega = 0.0;
  double speed = 0.0;
  std::string branch;
};

inline void write_speed_csv(std::ostream& os, const std::vector<SpeedRow>& rows) {
  os << "k,direction,omega,speed,branch\n";
  for (const auto& r : rows)
    os << num(r.k) << "," << r.direction << "," << num(r.omega) << "," << num(r.speed) << "," << r.branch << "\n";
}

// ---------------------------------------------------------------------------------------------
// JSON reports.

inline json comparison_to_json(long steps, const Comparison& c, const json& params) {
  return json {{"steps", steps}, {"fidelity", c.fidelity}, {"l2", c.l2}, {"l1", c.l1}, {"params", params}};
}

inline json fock_to_json(const FockReport& r) {
  json dev = json::array();
  for (int i = 0; i < 2; ++i) {
    json row = json::array();
    for (int j = 0; j < 2; ++j) row.push_back({r.deviation(i, j).real(), r.deviation(i, j).imag()});
    dev.push_back(row);
  }
  return json {{"dimension", r.dimension},
               {"max_deviation", r.max_deviation},
               {"anticommutator_residual", r.anticommutator_residual},
               {"deviation", dev}};
}

inline json ball_to_json(const CayleyBall& b, const GroupPresentation& p) {
  json vertices = json::array();
  for (std::size_t v = 0; v < b.size(); ++v)
    vertices.push_back({{"id", v}, {"label", b.labels[v]}, {"distance", b.distance[v]}, {"complete", static_cast<bool>(b.complete[v])}});
  json edges = json::array();
  for (const auto& e : b.edges()) edges.push_back({e[0], e[1], e[2]});
  std::string gens;
  for (char g : p.generators) gens += g;
  return json {{"radius", b.radius},
               {"generators", gens},
               {"identification_complete", b.identification_complete},
               {"vertices", vertices},
               {"edges", edges}};
}

inline json homogeneity_to_json(const HomogeneityReport& r) {
  return json {{"pass", r.pass()},
               {"h1", r.h1},
               {"h2", r.h2},
               {"h3", r.h3},
               {"h4", r.h4},
               {"h5", r.h5},
               {"h2_violations", r.h2_violations},
               {"h3_violations", r.h3_violations},
               {"h4_violations", r.h4_violations},
               {"h5_violations", r.h5_violations},
               {"interior", r.interior},
               {"loops_checked", r.loops_checked},
               {"loops_skipped", r.loops_skipped}};
}

}  // namespace qwalk::io
