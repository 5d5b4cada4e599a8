// qwalk command-line tool. Exit codes: 0 success, 1 failed check or numerical failure,
// 2 invalid input.

#include <qwalk/io.hpp>
#include <qwalk/maxwell.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <set>

using namespace qwalk;
using io::json;

namespace {

// ---------------------------------------------------------------------------------------------
// Output plumbing.

struct Context {
  std::string out;            // empty: stdout
  std::string format = "csv";  // csv | json (| dot for cayley ball)
  std::uint64_t seed = 20240917ULL;
  std::string command;
  io::ConfigEcho echo;
};

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InvalidInput("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

json parse_cell(const std::string& s) {
  if (s == "nan" || s == "inf" || s == "-inf") return nullptr;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return s;
}

// CSV body (header line plus rows) as {meta, columns, rows}.
json table_json(const Context& ctx, const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  std::getline(in, line);
  json columns = split(line);
  json rows = json::array();
  while (std::getline(in, line)) {
    json row = json::array();
    for (const auto& c : split(line)) row.push_back(parse_cell(c));
    rows.push_back(row);
  }
  return json {{"meta", io::meta(ctx.command, ctx.echo)}, {"columns", columns}, {"rows", rows}};
}

void emit_table(const Context& ctx, const std::string& csv) {
  Sink sink(ctx.out);
  if (ctx.format == "json") sink.stream() << table_json(ctx, csv).dump(2) << "\n";
  else sink.stream() << io::csv_preamble(ctx.command, ctx.echo) << csv;
}

void emit_json(const Context& ctx, json body, const std::string& path) {
  json doc {{"meta", io::meta(ctx.command, ctx.echo)}};
  for (auto& [k, v] : body.items()) doc[k] = v;
  Sink sink(path);
  sink.stream() << doc.dump(2) << "\n";
}

void require_format(const Context& ctx, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (ctx.format == f) return;
  throw InvalidInput("--format " + ctx.format + " is not available for this command");
}

// Effective value of every option of a subcommand, in declaration order.
io::ConfigEcho echo_of(const CLI::App* sub) {
  io::ConfigEcho e;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "h" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      value = r.empty() ? "true" : r.back();
      if (opt->get_expected_max() > 1) {
        value.clear();
        for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
      }
      if (opt->get_expected_max() == 0) value = "true";
    } else {
      value = opt->get_default_str();
      if (opt->get_expected_max() == 0 && value.empty()) value = "false";
    }
    e.emplace_back(name, value);
  }
  return e;
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
  std::vector<double> v;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InvalidInput(what + ": not a number: '" + cell + "'");
    }
  }
  if (n > 0 && v.size() != n) throw InvalidInput(what + ": expected " + std::to_string(n) + " comma-separated values");
  return v;
}

WaveVector parse_vector(const std::string& s, int d, const std::string& what) {
  const auto v = parse_list(s, static_cast<std::size_t>(d), what);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d);
}

Vec3 parse_axis(const std::string& s) {
  if (s == "x") return Vec3::UnitX();
  if (s == "y") return Vec3::UnitY();
  if (s == "z") return Vec3::UnitZ();
  const Vec3 v = parse_vector(s, 3, "axis");
  if (v.norm() == 0.0) throw InvalidInput("axis must be nonzero");
  return v;
}

FMap parse_fmap(const std::string& s) {
  if (s == "default") return default_fmap();
  if (s == "unit") return unit_fmap();
  throw InvalidInput("unknown f-map: " + s);
}

std::string join3(const Vec3& v) { return io::num(v[0]) + ";" + io::num(v[1]) + ";" + io::num(v[2]); }

// ---------------------------------------------------------------------------------------------
// Commands.

struct WalkOpts {
  std::string walk = "weyl3d+";
  double mass = 0.0;
  WalkSpec spec() const { return io::parse_walk(walk, mass); }
};

void add_walk(CLI::App* sub, WalkOpts& w, const std::string& def = "weyl3d+") {
  w.walk = def;
  sub->add_option("--walk", w.walk, "weyl{1,2,3}d{+,-}[/B] or dirac{1,2,3}d[{+,-}][/B]")->capture_default_str();
  sub->add_option("--mass", w.mass, "Dirac mass in [-1, 1]")->capture_default_str();
}

struct VerifyOpts {
  WalkOpts walk;
  std::string kernel;
  int points = 1000;
  double tol = 1e-12;
};

int cmd_verify(const Context& ctx, const VerifyOpts& o) {
  require_format(ctx, {"json", "csv"});
  json body;
  bool pass = true;
  if (!o.kernel.empty()) {
    std::ifstream in(o.kernel);
    if (!in) throw InvalidInput("cannot open kernel file: " + o.kernel);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("kernel file is not JSON: ") + e.what());
    }
    const TransitionKernel K = io::kernel_from_json(j);
    const UnitarityReport u = check_unitarity_conditions(K, o.tol);
    pass = u.pass;
    body = {{"kernel", o.kernel}, {"unitarity", io::unitarity_to_json(u)}};
  } else {
    const WalkSpec spec = o.walk.spec();
    if (o.points < 1) throw InvalidInput("--points must be positive");
    std::mt19937_64 gen(ctx.seed);
    const double half = spec.dim == 1 ? pi : std::sqrt(static_cast<double>(spec.dim)) * pi;
    std::uniform_real_distribution<double> u(-half, half);
    double worst = 0.0;
    for (int t = 0; t < o.points;) {
      WaveVector k(spec.dim);
      for (int i = 0; i < spec.dim; ++i) k[i] = u(gen);
      if (!bz_contains(k)) continue;
      worst = std::max(worst, unitarity_residual(symbol(k, spec).matrix));
      ++t;
    }
    const TransitionKernel K = position_kernel(spec);
    const UnitarityReport ur = check_unitarity_conditions(K, o.tol);
    pass = worst <= o.tol && ur.pass;
    body = {{"walk", spec.name()},
            {"symbol_unitarity", {{"points", o.points}, {"max_residual", worst}, {"pass", worst <= o.tol}}},
            {"kernel_terms", K.terms.size()},
            {"unitarity", io::unitarity_to_json(ur)}};
    if (spec.family == Family::weyl && spec.dim == 3) {
      const IsotropyReport iso = check_isotropy(K, binary_rotation_rep(spec), o.tol);
      body["isotropy"] = {{"covariant", iso.covariant}, {"transitive", iso.transitive}, {"max_residual", iso.max_residual}};
      pass = pass && iso.pass();
    }
  }
  body["pass"] = pass;
  emit_json(ctx, body, ctx.out);
  if (!pass) std::cerr << "verify: checks failed (residuals above " << o.tol << ")\n";
  return pass ? 0 : 1;
}

struct DispersionOpts {
  WalkOpts walk;
  int grid = 16;
  std::string k;
};

int cmd_dispersion(const Context& ctx, const DispersionOpts& o) {
  require_format(ctx, {"csv", "json"});
  const WalkSpec spec = o.walk.spec();
  std::vector<WaveVector> ks;
  if (!o.k.empty()) {
    ks.push_back(parse_vector(o.k, spec.dim, "--k"));
  } else {
    if (o.grid < 2 || std::pow(o.grid, spec.dim) > 4e6) throw InvalidInput("--grid must be >= 2 with at most 4e6 points");
    for (const auto& k : momentum_grid(o.grid, spec.dim).points) ks.push_back(bz_wrap(k));
  }
  std::ostringstream os;
  io::write_dispersion_csv(os, ks, spec);
  emit_table(ctx, os.str());
  return 0;
}

struct EvolveOpts {
  WalkOpts walk;
  std::string k0 = "0.1";
  double sigma = 20.0;
  std::string x0;
  long steps = 200;
  int grid = 4096;
  long stride = 0;
  std::string compare = "schrodinger";
  bool all_bands = false;
  std::string report;
  std::string state;
  std::string marginal;
  double l1_tol = 0.05;
};

struct Prepared {
  WalkSpec spec;
  PacketParams packet;
  FieldState initial;
};

Prepared prepare_packet(const EvolveOpts& o) {
  Prepared p {o.walk.spec(), {}, {}};
  const int d = p.spec.dim;
  if (o.grid < 16) throw InvalidInput("--grid must be at least 16");
  if (std::pow(o.grid, d) > 1.7e7) throw InvalidInput("--grid too large for this dimension");
  if (o.steps < 0) throw InvalidInput("--steps must be non-negative");
  p.packet.k0 = parse_vector(o.k0, d, "--k0");
  p.packet.sigma = o.sigma;
  p.packet.x0 = o.x0.empty() ? Eigen::VectorXd::Constant(d, o.grid / 4.0) : Eigen::VectorXd(parse_vector(o.x0, d, "--x0"));
  p.packet.project_positive = !o.all_bands;
  p.initial = make_packet(p.packet, o.grid, p.spec);
  return p;
}

FieldState reference_state(const EvolveOpts& o, const Prepared& p, std::vector<std::string>* warnings) {
  if (o.compare == "schrodinger") {
    SchrodingerOptions so;
    so.warnings = warnings;
    return schrodinger_evolve(p.initial, packet_model(p.packet.k0, p.spec), o.steps, so);
  }
  if (o.compare == "continuum") return continuum_reference(p.initial, p.spec, o.steps);
  throw InvalidInput("--compare must be schrodinger or continuum");
}

json comparison_report(const EvolveOpts& o, const Prepared& p, const FieldState& walk, const FieldState& ref,
                       const std::vector<std::string>& warnings) {
  const Comparison c = compare(walk, ref);
  json params {{"walk", p.spec.name()},
               {"reference", o.compare},
               {"k0", std::vector<double>(p.packet.k0.data(), p.packet.k0.data() + p.packet.k0.size())},
               {"sigma", o.sigma},
               {"grid", o.grid},
               {"l1_tolerance", o.l1_tol}};
  json body = io::comparison_to_json(o.steps, c, params);
  body["pass"] = c.l1 <= o.l1_tol;
  body["warnings"] = warnings;
  return body;
}

int cmd_evolve(const Context& ctx, const EvolveOpts& o) {
  require_format(ctx, {"csv", "json"});
  const Prepared p = prepare_packet(o);
  std::vector<std::string> warnings;
  const FieldState ref = reference_state(o, p, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const long stride = o.stride > 0 ? o.stride : std::max(1L, o.steps / 4);
  std::ostringstream os;
  io::write_trajectory_csv(os, packet_trajectory(p.initial, p.spec, packet_model(p.packet.k0, p.spec), o.steps, stride),
                           p.spec.dim);
  emit_table(ctx, os.str());
  const FieldState walk = step_momentum(p.initial, p.spec, o.steps);
  if (!o.state.empty()) {
    Sink s(o.state);
    s.stream() << io::csv_preamble(ctx.command, ctx.echo);
    io::write_state_csv(s.stream(), walk);
  }
  if (!o.marginal.empty()) {
    Sink s(o.marginal);
    s.stream() << io::csv_preamble(ctx.command, ctx.echo);
    io::write_marginal_csv(s.stream(), walk);
  }
  const json body = comparison_report(o, p, walk, ref, warnings);
  if (!o.report.empty()) emit_json(ctx, body, o.report);
  else std::cerr << "comparison: l1=" << io::num(body["l1"].get<double>()) << " fidelity=" << io::num(body["fidelity"].get<double>())
                 << "\n";
  if (!body["pass"].get<bool>()) {
    std::cerr << "evolve: l1 above tolerance " << o.l1_tol << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const Context& ctx, const EvolveOpts& o) {
  require_format(ctx, {"json"});
  const Prepared p = prepare_packet(o);
  std::vector<std::string> warnings;
  const FieldState ref = reference_state(o, p, &warnings);
  const json body = comparison_report(o, p, step_momentum(p.initial, p.spec, o.steps), ref, warnings);
  emit_json(ctx, body, ctx.out);
  return body["pass"].get<bool>() ? 0 : 1;
}

struct OrbitOpts {
  WalkOpts walk;
  std::string k = "0.3,0,0";
  std::string rotation;
  std::string boost;
  int samples = 360;
  double max_rapidity = 3.0;
  std::string fmap = "default";
};

int cmd_orbit(const Context& ctx, const OrbitOpts& o) {
  require_format(ctx, {"csv", "json"});
  const WalkSpec spec = o.walk.spec();
  if (o.rotation.empty() == o.boost.empty()) throw InvalidInput("give exactly one of --rotation or --boost");
  if (o.samples < 1) throw InvalidInput("--samples must be positive");
  OrbitFamily fam;
  if (!o.rotation.empty()) {
    fam.kind = OrbitFamily::Kind::rotation;
    fam.axis = parse_axis(o.rotation);
    for (int i = 0; i < o.samples; ++i) fam.parameters.push_back(2 * pi * i / o.samples);
  } else {
    fam.kind = OrbitFamily::Kind::boost;
    fam.axis = parse_axis(o.boost);
    for (int i = 0; i < o.samples; ++i)
      fam.parameters.push_back(o.samples == 1 ? 0.0 : o.max_rapidity * i / (o.samples - 1));
  }
  std::ostringstream os;
  io::write_orbit_csv(os, orbit(parse_vector(o.k, 3, "--k"), fam, parse_fmap(o.fmap), spec));
  emit_table(ctx, os.str());
  return 0;
}

struct BoostOpts {
  WalkOpts walk;
  std::string k = "0.01,0,0";
  std::string beta = "0.5,0,0";
  std::string fmap = "default";
};

int cmd_boost(const Context& ctx, const BoostOpts& o) {
  require_format(ctx, {"json"});
  const WalkSpec spec = o.walk.spec();
  const Vec3 k = parse_vector(o.k, 3, "--k"), beta = parse_vector(o.beta, 3, "--beta");
  const FMap f = parse_fmap(o.fmap);
  const Vec3 kb = nonlinear_boost(k, beta, f, spec);
  FourVector p;
  p << k.norm(), k;
  const Vec3 lin = (boost_matrix(beta) * p).tail<3>();
  auto arr = [](const Vec3& v) { return std::vector<double> {v[0], v[1], v[2]}; };
  emit_json(ctx,
            {{"k", arr(k)},
             {"beta", arr(beta)},
             {"k_boosted", arr(kb)},
             {"k_linear", arr(lin)},
             {"omega", phase(k, spec).omega()},
             {"omega_boosted", phase(kb, spec).omega()},
             {"region", classify_region(k)},
             {"shell_residual", shell_residual(k, boost_matrix(beta), f, spec)}},
            ctx.out);
  return 0;
}

struct PhotonOpts {
  WalkOpts walk;
  std::string direction = "1,1,1";
  double kmin = 1e-3;
  double kmax = 1e-2;
  int samples = 10;
  double a_star = 0.0;
};

int cmd_maxwell_dispersion(const Context& ctx, const PhotonOpts& o) {
  require_format(ctx, {"csv", "json"});
  const WalkSpec spec = o.walk.spec();
  const Vec3 dir = parse_axis(o.direction).normalized();
  if (o.samples < 1 || !(o.kmax >= o.kmin) || !(o.kmin >= 0)) throw InvalidInput("need 0 <= kmin <= kmax and samples >= 1");
  std::vector<io::SpeedRow> rows;
  for (int i = 0; i < o.samples; ++i) {
    const double k = o.samples == 1 ? o.kmin : o.kmin + (o.kmax - o.kmin) * i / (o.samples - 1);
    const double speed = k > 0 ? vacuum_speed(k, dir, spec) : 1.0;
    rows.push_back({k, join3(dir), photon_dispersion(Vec3(k * dir), spec), speed, spec.name()});
  }
  std::ostringstream os;
  io::write_speed_csv(os, rows);
  emit_table(ctx, os.str());
  return 0;
}

int cmd_maxwell_speed(const Context& ctx, const PhotonOpts& o) {
  require_format(ctx, {"json"});
  const WalkSpec spec = o.walk.spec();
  const Vec3 dir = parse_axis(o.direction).normalized();
  const SpeedFit fit = vacuum_speed_slope(dir, spec, o.kmin, o.kmax, o.samples);
  json body {{"walk", spec.name()},
             {"direction", std::vector<double> {dir[0], dir[1], dir[2]}},
             {"kmin", o.kmin},
             {"kmax", o.kmax},
             {"points", o.samples},
             {"slope", fit.slope},
             {"intercept", fit.intercept}};
  if (o.a_star > 0) {
    const double c_k = vacuum_speed(o.kmax, dir, spec);
    body["planck_mass_estimate"] = fit.slope == 0.0 ? json(nullptr) : json(planck_mass_estimate(o.kmax, c_k, 1.0, o.a_star));
  }
  emit_json(ctx, body, ctx.out);
  return 0;
}

struct FockOpts {
  int M = 8;
  int nk = 4;
  std::vector<int> fill;
  std::string u1 = "1,0,0";
  std::string u2 = "0,1,0";
  std::string route = "auto";
};

int cmd_fock(const Context& ctx, const FockOpts& o) {
  require_format(ctx, {"json"});
  FockCheckConfig cfg;
  cfg.M = o.M;
  cfg.Nk = o.nk;
  cfg.filling = o.fill;
  cfg.u1 = parse_vector(o.u1, 3, "--u1");
  cfg.u2 = parse_vector(o.u2, 3, "--u2");
  FockReport r;
  if (o.route == "auto") r = fock_commutator_check(cfg);
  else if (o.route == "explicit") r = fock_commutator_check_explicit(cfg);
  else if (o.route == "sparse") r = fock_commutator_check_sparse(cfg);
  else throw InvalidInput("--route must be auto, explicit or sparse");
  json body = io::fock_to_json(r);
  body["route"] = o.route == "auto" ? (cfg.modes() <= 24 ? "explicit" : "sparse") : o.route;
  emit_json(ctx, body, ctx.out);
  return 0;
}

struct BallOpts {
  std::string presentation;
  std::string builtin;
  int radius = 3;
  bool scan = false;
};

GroupPresentation presentation_of(const BallOpts& o) {
  if (o.presentation.empty() == o.builtin.empty()) throw InvalidInput("give exactly one of --presentation or --builtin");
  return o.builtin.empty() ? parse_presentation(o.presentation) : builtin_presentation(o.builtin);
}

int cmd_ball(const Context& ctx, const BallOpts& o) {
  require_format(ctx, {"json", "dot"});
  const GroupPresentation p = presentation_of(o);
  const CayleyBall b = build_ball(p, o.radius, BallOptions {8, !o.scan});
  if (ctx.format == "dot") {
    Sink s(ctx.out);
    s.stream() << "// qwalk " << io::version << " command=" << ctx.command << "\n" << ball_to_dot(b, p);
    return 0;
  }
  json body = io::ball_to_json(b, p);
  body["family"] = p.family;
  const HomogeneityReport h = check_homogeneity(b, p);
  body["homogeneity"] = io::homogeneity_to_json(h);
  if (!b.identification_complete) std::cerr << "warning: identification incomplete (no certified normal form)\n";
  emit_json(ctx, body, ctx.out);
  return 0;
}

struct ReduceOpts {
  std::string fixture = "index4";
  std::string kernel = "projector";
  int points = 100;
};

int cmd_reduce(const Context& ctx, const ReduceOpts& o) {
  require_format(ctx, {"json"});
  CosetStructure cs;
  std::string family;
  if (o.fixture == "index4") cs = p4_cosets(), family = "p4";
  else if (o.fixture == "index2") cs = klein_cosets(), family = "klein";
  else if (o.fixture == "trivial") cs = z2_cosets(), family = "z2";
  else throw InvalidInput("--fixture must be index4, index2 or trivial");
  GroupKernel K;
  if (o.kernel == "shift") K = GroupKernel {1, {{Word {0}, Mat::Identity(1, 1)}}};
  else if (o.kernel == "lazy") K = GroupKernel {1, {{Word {0}, Mat::Constant(1, 1, 0.5)}, {Word {2}, Mat::Constant(1, 1, 0.5)}}};
  else if (o.kernel == "projector") {
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    K = GroupKernel {2, {{Word {0}, p0}, {Word {2}, p1}}};
  } else {
    throw InvalidInput("--kernel must be shift, projector or lazy");
  }
  const TransitionKernel red = coset_reduce(K, cs);
  std::mt19937_64 gen(ctx.seed);
  std::uniform_real_distribution<double> u(-pi, pi);
  double err = 0.0;
  for (int t = 0; t < o.points; ++t) {
    const Eigen::Vector2d k(u(gen), u(gen));
    err = std::max(err, (induced_symbol(red, k) - direct_bloch_matrix(K, cs, k)).cwiseAbs().maxCoeff());
  }
  const NormalForm nf = *builtin_presentation(family).normal_form;
  emit_json(ctx,
            {{"index", cs.index()},
             {"induced_kernel", io::kernel_to_json(red)},
             {"direct_evaluation_error", err},
             {"group_unitarity", io::unitarity_to_json(check_group_unitarity(K, nf))},
             {"induced_unitarity", io::unitarity_to_json(check_unitarity_conditions(red))}},
            ctx.out);
  return err <= 1e-12 ? 0 : 1;
}

struct UnitsOpts {
  std::string anchor = "length";
  double value = 1.616255e-35;
};

int cmd_units(const Context& ctx, const UnitsOpts& o) {
  require_format(ctx, {"json"});
  PlanckAnchor a;
  if (o.anchor == "length") a = PlanckAnchor::length;
  else if (o.anchor == "time") a = PlanckAnchor::time;
  else if (o.anchor == "mass") a = PlanckAnchor::mass;
  else throw InvalidInput("--anchor must be length, time or mass");
  const PlanckUnits p = planck_units(a, o.value);
  emit_json(ctx, {{"a_star", p.a}, {"t_star", p.t}, {"m_star", p.m}, {"c", speed_of_light}, {"hbar", hbar}}, ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------------------------
// Configuration file: flat "key = value" lines, '#' comments. Entries become "--key=value"
// arguments placed before the command-line flags, so flags take precedence.

std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidInput(path + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (config.empty()) return args;
  static const std::set<std::string> groups {"lorentz", "maxwell", "cayley"};
  std::size_t pos = 0;
  while (pos < args.size() && !args[pos].empty() && args[pos][0] == '-') pos += 1;  // global flags before the command
  if (pos < args.size()) {
    const bool grouped = groups.count(args[pos]) > 0;
    pos += grouped && pos + 1 < args.size() ? 2 : 1;
  }
  const auto extra = read_config(config);
  args.insert(args.begin() + static_cast<long>(pos), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app {"qwalk: quantum walks on Cayley graphs, their dispersion, relativity and Maxwell layers"};
  app.name("qwalk");
  app.set_version_flag("--version", io::version);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Context ctx;
  std::string config_unused;
  app.add_option("--config", config_unused, "flat key = value file; command-line flags take precedence");

  std::function<int()> run;
  auto bind = [&](CLI::App* sub, const std::string& name, std::function<int()> fn) {
    sub->callback([&, sub, name, fn]() {
      ctx.command = name;
      ctx.echo = echo_of(sub);
      run = fn;
    });
  };

  VerifyOpts verify;
  auto* s_verify = app.add_subcommand("verify", "unitarity and isotropy checks of a walk or a kernel file");
  add_walk(s_verify, verify.walk);
  s_verify->add_option("--kernel", verify.kernel, "kernel JSON file to check instead of a named walk");
  s_verify->add_option("--points", verify.points, "random zone points for the symbol check")->capture_default_str();
  s_verify->add_option("--tol", verify.tol, "residual tolerance")->capture_default_str();
  bind(s_verify, "verify", [&] { return cmd_verify(ctx, verify); });

  DispersionOpts disp;
  auto* s_disp = app.add_subcommand("dispersion", "omega over a momentum grid or at one wave-vector");
  add_walk(s_disp, disp.walk);
  s_disp->add_option("--grid", disp.grid, "points per axis")->capture_default_str();
  s_disp->add_option("--k", disp.k, "single wave-vector, comma separated");
  bind(s_disp, "dispersion", [&] { return cmd_dispersion(ctx, disp); });

  EvolveOpts evolve, cmp;
  auto add_evolve = [&](CLI::App* sub, EvolveOpts& o) {
    add_walk(sub, o.walk, "dirac1d");
    sub->add_option("--k0", o.k0, "packet momentum, comma separated")->capture_default_str();
    sub->add_option("--sigma", o.sigma, "position spread in sites")->capture_default_str();
    sub->add_option("--x0", o.x0, "packet center in generator coordinates (default grid/4)");
    sub->add_option("--steps", o.steps, "walk steps")->capture_default_str();
    sub->add_option("--grid", o.grid, "sites per axis")->capture_default_str();
    sub->add_option("--compare", o.compare, "schrodinger | continuum")->capture_default_str();
    sub->add_flag("--all-bands", o.all_bands, "keep both bands instead of projecting on e^{-i omega}");
    sub->add_option("--l1-tol", o.l1_tol, "L1 tolerance of the comparison")->capture_default_str();
  };
  auto* s_evolve = app.add_subcommand("evolve", "wavepacket evolution with trajectory and comparison outputs");
  add_evolve(s_evolve, evolve);
  s_evolve->add_option("--stride", evolve.stride, "trajectory sampling stride (default steps/4)");
  s_evolve->add_option("--report", evolve.report, "comparison JSON path");
  s_evolve->add_option("--state", evolve.state, "final state CSV path");
  s_evolve->add_option("--marginal", evolve.marginal, "final probability marginal CSV path");
  bind(s_evolve, "evolve", [&] { return cmd_evolve(ctx, evolve); });

  auto* s_cmp = app.add_subcommand("compare", "walk against the packet model or the continuum reference");
  add_evolve(s_cmp, cmp);
  bind(s_cmp, "compare", [&] { return cmd_compare(ctx, cmp); });

  auto* s_lorentz = app.add_subcommand("lorentz", "nonlinear Lorentz transformations");
  s_lorentz->require_subcommand(1);
  OrbitOpts orb;
  auto* s_orbit = s_lorentz->add_subcommand("orbit", "orbit of a wave-vector under rotations or boosts");
  add_walk(s_orbit, orb.walk);
  s_orbit->add_option("--k", orb.k, "seed wave-vector")->capture_default_str();
  s_orbit->add_option("--rotation", orb.rotation, "rotation axis: x, y, z or a vector");
  s_orbit->add_option("--boost", orb.boost, "boost direction: x, y, z or a vector");
  s_orbit->add_option("--samples", orb.samples, "orbit samples")->capture_default_str();
  s_orbit->add_option("--max-rapidity", orb.max_rapidity, "largest rapidity of a boost orbit")->capture_default_str();
  s_orbit->add_option("--fmap", orb.fmap, "default | unit")->capture_default_str();
  bind(s_orbit, "lorentz orbit", [&] { return cmd_orbit(ctx, orb); });

  BoostOpts bo;
  auto* s_boost = s_lorentz->add_subcommand("boost", "one nonlinear boost with the linear comparison");
  add_walk(s_boost, bo.walk);
  s_boost->add_option("--k", bo.k, "wave-vector")->capture_default_str();
  s_boost->add_option("--beta", bo.beta, "boost velocity")->capture_default_str();
  s_boost->add_option("--fmap", bo.fmap, "default | unit")->capture_default_str();
  bind(s_boost, "lorentz boost", [&] { return cmd_boost(ctx, bo); });

  auto* s_maxwell = app.add_subcommand("maxwell", "photon dispersion and vacuum speed");
  s_maxwell->require_subcommand(1);
  PhotonOpts md, ms;
  auto add_photon = [&](CLI::App* sub, PhotonOpts& o) {
    add_walk(sub, o.walk);
    sub->add_option("--direction", o.direction, "x, y, z or a vector")->capture_default_str();
    sub->add_option("--kmin", o.kmin, "smallest |k|")->capture_default_str();
    sub->add_option("--kmax", o.kmax, "largest |k|")->capture_default_str();
    sub->add_option("--samples", o.samples, "points in [kmin, kmax]")->capture_default_str();
  };
  auto* s_md = s_maxwell->add_subcommand("dispersion", "omega and speed along a direction");
  add_photon(s_md, md);
  bind(s_md, "maxwell dispersion", [&] { return cmd_maxwell_dispersion(ctx, md); });
  auto* s_ms = s_maxwell->add_subcommand("speed", "least-squares slope of c(k) - 1");
  add_photon(s_ms, ms);
  s_ms->add_option("--a-star", ms.a_star, "lattice length in metres for the mass estimate");
  bind(s_ms, "maxwell speed", [&] { return cmd_maxwell_speed(ctx, ms); });

  FockOpts fk;
  auto* s_fock = app.add_subcommand("fock", "commutator of the polarization pair operators");
  s_fock->add_option("--M", fk.M, "orbitals per species")->capture_default_str();
  s_fock->add_option("--nk", fk.nk, "momenta in Omega_k")->capture_default_str();
  s_fock->add_option("--fill", fk.fill, "occupied global modes")->expected(0, -1)->delimiter(',');
  s_fock->add_option("--u1", fk.u1, "first polarization vector")->capture_default_str();
  s_fock->add_option("--u2", fk.u2, "second polarization vector")->capture_default_str();
  s_fock->add_option("--route", fk.route, "auto | explicit | sparse")->capture_default_str();
  bind(s_fock, "fock", [&] { return cmd_fock(ctx, fk); });

  auto* s_cayley = app.add_subcommand("cayley", "Cayley graphs and coset reduction");
  s_cayley->require_subcommand(1);
  BallOpts ball;
  auto* s_ball = s_cayley->add_subcommand("ball", "ball of the Cayley graph with homogeneity report");
  s_ball->add_option("--presentation", ball.presentation, "<gens | relators>");
  s_ball->add_option("--builtin", ball.builtin, "z1 z2 z3 bcc free2 p4 klein fuchsian");
  s_ball->add_option("--radius", ball.radius, "ball radius (at most 8)")->capture_default_str();
  s_ball->add_flag("--scan", ball.scan, "use bounded scanning even when a normal form exists");
  bind(s_ball, "cayley ball", [&] { return cmd_ball(ctx, ball); });
  ReduceOpts red;
  auto* s_red = s_cayley->add_subcommand("reduce", "induced walk on the translation subgroup");
  s_red->add_option("--fixture", red.fixture, "index4 | index2 | trivial")->capture_default_str();
  s_red->add_option("--kernel", red.kernel, "shift | projector | lazy")->capture_default_str();
  s_red->add_option("--points", red.points, "random k for the direct evaluation check")->capture_default_str();
  bind(s_red, "cayley reduce", [&] { return cmd_reduce(ctx, red); });

  UnitsOpts un;
  auto* s_units = app.add_subcommand("units", "Planck-unit identities from one anchor");
  s_units->add_option("--anchor", un.anchor, "length | time | mass")->capture_default_str();
  s_units->add_option("--value", un.value, "anchor value in SI units")->capture_default_str();
  bind(s_units, "units", [&] { return cmd_units(ctx, un); });

  // Output options on every leaf command; the default format depends on the artifact kind.
  for (auto [sub, fmt] : std::vector<std::pair<CLI::App*, std::string>> {
           {s_verify, "json"}, {s_disp, "csv"},  {s_evolve, "csv"}, {s_cmp, "json"},  {s_orbit, "csv"},  {s_boost, "json"},
           {s_md, "csv"},      {s_ms, "json"},   {s_fock, "json"},  {s_ball, "json"}, {s_red, "json"},   {s_units, "json"}}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--out", ctx.out, "output path (default stdout)");
    sub->add_option("--format", ctx.format, "csv | json (dot for cayley ball)")->default_str(fmt);
    sub->add_option("--seed", ctx.seed, "64-bit seed for all random sampling")->capture_default_str();
    sub->preparse_callback([&ctx, fmt](std::size_t) { ctx.format = fmt; });
  }

  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const qwalk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    return run ? run() : 2;
  } catch (const qwalk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
