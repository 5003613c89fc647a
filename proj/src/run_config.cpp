#include "gyrokin/run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "gyrokin/errors.hpp"

namespace gyrokin {

namespace {

using nlohmann::json;

// All readers report violations as "<path>: <requirement>" so a user can
// find the offending field without reading the schema.

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw config_error(path + "." + it.key() + ": unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw config_error(path + ": must be an object");
  return j;
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error(path + ": must be a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) throw config_error(path + ": must be positive");
  return v;
}

int get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw config_error(path + ": must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw config_error(path + ": must be a string");
  return j.get<std::string>();
}

template <std::size_t N>
std::array<double, N> get_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) {
    throw config_error(path + ": must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = get_number(j[i], path);
  return out;
}

void parse_params(const json& j, RunConfig& cfg) {
  require_object(j, "params");
  check_keys(j, "params", {"q", "m", "B", "theta", "tau"});
  if (const json* v = find(j, "q")) cfg.params.q = get_number(*v, "params.q");
  if (const json* v = find(j, "m")) cfg.params.m = get_number(*v, "params.m");
  if (const json* v = find(j, "B")) cfg.params.B = get_number(*v, "params.B");
  if (const json* v = find(j, "theta")) cfg.params.theta = get_number(*v, "params.theta");
  if (const json* v = find(j, "tau")) cfg.params.tau = get_number(*v, "params.tau");
  validate_params(cfg.params);
}

CrossSection parse_cross_section(const json& j) {
  require_object(j, "cross_section");
  check_keys(j, "cross_section", {"family", "sigma0", "gamma", "delta", "s_min", "s_max"});
  CrossSectionFamily family = CrossSectionFamily::Constant;
  if (const json* v = find(j, "family")) {
    const std::string f = get_string(*v, "cross_section.family");
    if (f == "constant") {
      family = CrossSectionFamily::Constant;
    } else if (f == "power_law") {
      family = CrossSectionFamily::PowerLaw;
    } else {
      throw config_error("cross_section.family: must be \"constant\" or \"power_law\"");
    }
  }
  double sigma0 = 1.0, gamma = 0.0, delta = 0.0, s_min = 0.0, s_max = 10.0;
  if (const json* v = find(j, "sigma0")) sigma0 = get_number(*v, "cross_section.sigma0");
  if (const json* v = find(j, "gamma")) gamma = get_number(*v, "cross_section.gamma");
  if (const json* v = find(j, "delta")) delta = get_number(*v, "cross_section.delta");
  if (const json* v = find(j, "s_min")) s_min = get_number(*v, "cross_section.s_min");
  if (const json* v = find(j, "s_max")) s_max = get_number(*v, "cross_section.s_max");
  return make_cross_section(family, sigma0, gamma, delta, s_min, s_max);
}

void parse_potential(const json& j, RunConfig& cfg) {
  require_object(j, "potential");
  check_keys(j, "potential",
             {"family", "gradient", "curvature", "amp", "k", "shift", "a3", "amp3", "k3",
              "shift3"});
  Potential& pot = cfg.potential;
  std::string f = "none";
  if (const json* v = find(j, "family")) f = get_string(*v, "potential.family");
  if (f == "none") {
    pot.family = PotentialFamily::None;
  } else if (f == "uniform_gradient") {
    pot.family = PotentialFamily::UniformGradient;
  } else if (f == "harmonic") {
    pot.family = PotentialFamily::Harmonic;
  } else if (f == "separable") {
    pot.family = PotentialFamily::Separable;
  } else {
    throw config_error(
        "potential.family: must be one of \"none\", \"uniform_gradient\", \"harmonic\", "
        "\"separable\"");
  }
  if (const json* v = find(j, "gradient")) {
    pot.gradient = get_vector<3>(*v, "potential.gradient");
  }
  if (const json* v = find(j, "curvature")) {
    pot.curvature = get_vector<3>(*v, "potential.curvature");
  }
  if (const json* v = find(j, "amp")) pot.amp = get_number(*v, "potential.amp");
  if (const json* v = find(j, "k")) pot.k = get_vector<2>(*v, "potential.k");
  if (const json* v = find(j, "shift")) pot.shift = get_number(*v, "potential.shift");
  if (const json* v = find(j, "a3")) pot.a3 = get_number(*v, "potential.a3");
  if (const json* v = find(j, "amp3")) pot.amp3 = get_number(*v, "potential.amp3");
  if (const json* v = find(j, "k3")) pot.k3 = get_number(*v, "potential.k3");
  if (const json* v = find(j, "shift3")) pot.shift3 = get_number(*v, "potential.shift3");
}

void parse_grid(const json& j, RunConfig& cfg) {
  require_object(j, "grid");
  check_keys(j, "grid", {"n_y1", "n_y2", "n_x3", "n_r", "n_v3", "L", "L3", "R_max", "V3"});
  ReducedGrid g;
  if (const json* v = find(j, "n_y1")) g.n_y1 = get_integer(*v, "grid.n_y1");
  if (const json* v = find(j, "n_y2")) g.n_y2 = get_integer(*v, "grid.n_y2");
  if (const json* v = find(j, "n_x3")) g.n_x3 = get_integer(*v, "grid.n_x3");
  if (const json* v = find(j, "n_r")) g.n_r = get_integer(*v, "grid.n_r");
  if (const json* v = find(j, "n_v3")) g.n_v3 = get_integer(*v, "grid.n_v3");
  if (const json* v = find(j, "L")) g.L = get_number(*v, "grid.L");
  if (const json* v = find(j, "L3")) g.L3 = get_number(*v, "grid.L3");
  if (const json* v = find(j, "R_max")) g.R_max = get_number(*v, "grid.R_max");
  if (const json* v = find(j, "V3")) g.V3 = get_number(*v, "grid.V3");
  validate_grid(g);
  cfg.grid = std::make_shared<ReducedGrid>(g);
}

void parse_quadrature(const json& j, RunConfig& cfg) {
  require_object(j, "quadrature");
  check_keys(j, "quadrature", {"n_phi", "n_alpha", "interp", "gyro_nodes"});
  int n_phi = cfg.solver.boltzmann.n_phi;
  int n_alpha = cfg.solver.boltzmann.n_alpha;
  InterpScheme interp = cfg.solver.boltzmann.interp;
  if (const json* v = find(j, "n_phi")) {
    n_phi = get_integer(*v, "quadrature.n_phi");
    if (n_phi < 2) throw config_error("quadrature.n_phi: must be at least 2");
  }
  if (const json* v = find(j, "n_alpha")) {
    n_alpha = get_integer(*v, "quadrature.n_alpha");
    if (n_alpha < 4 || n_alpha % 2 != 0) {
      throw config_error("quadrature.n_alpha: must be even and at least 4");
    }
  }
  if (const json* v = find(j, "interp")) {
    const std::string s = get_string(*v, "quadrature.interp");
    if (s == "bilinear") {
      interp = InterpScheme::Bilinear;
    } else if (s == "spectral") {
      interp = InterpScheme::Spectral;
    } else {
      throw config_error("quadrature.interp: must be \"bilinear\" or \"spectral\"");
    }
  }
  if (const json* v = find(j, "gyro_nodes")) {
    cfg.projection.n_alpha = get_integer(*v, "quadrature.gyro_nodes");
    if (cfg.projection.n_alpha < 4) {
      throw config_error("quadrature.gyro_nodes: must be at least 4");
    }
  }
  cfg.solver.boltzmann.n_phi = n_phi;
  cfg.solver.boltzmann.n_alpha = n_alpha;
  cfg.solver.boltzmann.interp = interp;
  cfg.solver.landau.n_phi = n_phi;
  cfg.solver.landau.n_alpha = n_alpha;
  cfg.solver.landau.interp = interp;
}

void parse_solver(const json& j, RunConfig& cfg) {
  require_object(j, "solver");
  check_keys(j, "solver",
             {"model", "splitting", "limiter", "dt", "cfl", "t_final", "diag_every",
              "snapshot_every", "field_nodes"});
  SolverConfig& s = cfg.solver;
  if (const json* v = find(j, "model")) {
    const std::string m = get_string(*v, "solver.model");
    if (m == "none") {
      s.model = CollisionModel::None;
    } else if (m == "boltzmann") {
      s.model = CollisionModel::Boltzmann;
    } else if (m == "fokker-planck") {
      s.model = CollisionModel::FokkerPlanck;
    } else if (m == "landau") {
      s.model = CollisionModel::Landau;
    } else {
      throw config_error(
          "solver.model: must be one of \"none\", \"boltzmann\", \"fokker-planck\", "
          "\"landau\"");
    }
  }
  if (const json* v = find(j, "splitting")) {
    const std::string m = get_string(*v, "solver.splitting");
    if (m == "lie") {
      s.splitting = SplittingScheme::Lie;
    } else if (m == "strang") {
      s.splitting = SplittingScheme::Strang;
    } else {
      throw config_error("solver.splitting: must be \"lie\" or \"strang\"");
    }
  }
  if (const json* v = find(j, "limiter")) {
    const std::string m = get_string(*v, "solver.limiter");
    if (m == "upwind") {
      s.limiter = FluxLimiter::Upwind;
    } else if (m == "muscl") {
      s.limiter = FluxLimiter::Muscl;
    } else {
      throw config_error("solver.limiter: must be \"upwind\" or \"muscl\"");
    }
  }
  if (const json* v = find(j, "dt")) {
    s.dt = get_number(*v, "solver.dt");
    if (s.dt < 0.0) throw config_error("solver.dt: must be zero (derive from CFL) or positive");
  }
  if (const json* v = find(j, "cfl")) s.cfl = get_number(*v, "solver.cfl");
  if (const json* v = find(j, "t_final")) s.t_final = get_positive(*v, "solver.t_final");
  if (const json* v = find(j, "diag_every")) {
    s.diag_every = get_integer(*v, "solver.diag_every");
  }
  if (const json* v = find(j, "snapshot_every")) {
    s.snapshot_every = get_integer(*v, "solver.snapshot_every");
  }
  if (const json* v = find(j, "field_nodes")) {
    s.field_nodes = get_integer(*v, "solver.field_nodes");
  }
  validate_solver_config(s);
}

void parse_initial(const json& j, RunConfig& cfg) {
  require_object(j, "initial");
  check_keys(j, "initial",
             {"family", "scale", "vtheta", "amplitude", "center", "width", "v3_shift"});
  InitialSpec& in = cfg.initial;
  if (const json* v = find(j, "family")) {
    in.family = get_string(*v, "initial.family");
    if (in.family != "maxwellian" && in.family != "gaussian") {
      throw config_error("initial.family: must be \"maxwellian\" or \"gaussian\"");
    }
  }
  if (const json* v = find(j, "scale")) in.scale = get_positive(*v, "initial.scale");
  if (const json* v = find(j, "vtheta")) in.vtheta = get_positive(*v, "initial.vtheta");
  if (const json* v = find(j, "amplitude")) {
    in.amplitude = get_positive(*v, "initial.amplitude");
  }
  if (const json* v = find(j, "center")) in.center = get_vector<2>(*v, "initial.center");
  if (const json* v = find(j, "width")) in.width = get_positive(*v, "initial.width");
  if (const json* v = find(j, "v3_shift")) in.v3_shift = get_number(*v, "initial.v3_shift");
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  require_object(j, "config");
  check_keys(j, "config",
             {"params", "cross_section", "potential", "grid", "quadrature", "solver",
              "initial", "output_dir", "seed"});
  RunConfig cfg;
  if (const json* v = find(j, "params")) parse_params(*v, cfg);
  CrossSection cs;
  if (const json* v = find(j, "cross_section")) {
    cs = parse_cross_section(*v);
  } else {
    cs = make_cross_section(CrossSectionFamily::Constant, 1.0, 0.0, 0.0, 0.0, 10.0);
  }
  cfg.solver.boltzmann.cross_section = cs;
  cfg.solver.landau.cross_section = cs;
  if (const json* v = find(j, "potential")) parse_potential(*v, cfg);
  if (const json* v = find(j, "grid")) {
    parse_grid(*v, cfg);
  } else {
    auto g = std::make_shared<ReducedGrid>();
    validate_grid(*g);
    cfg.grid = g;
  }
  if (const json* v = find(j, "quadrature")) parse_quadrature(*v, cfg);
  if (const json* v = find(j, "solver")) {
    parse_solver(*v, cfg);
  } else {
    validate_solver_config(cfg.solver);
  }
  if (const json* v = find(j, "initial")) parse_initial(*v, cfg);
  if (const json* v = find(j, "output_dir")) {
    cfg.output_dir = get_string(*v, "output_dir");
    if (cfg.output_dir.empty()) throw config_error("output_dir: must not be empty");
  }
  if (const json* v = find(j, "seed")) {
    if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
      throw config_error("seed: must be a non-negative integer");
    }
    cfg.seed = v->get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config: " + path + " is not valid JSON (" + e.what() + ")");
  }
  return parse_run_config(j);
}

ScalarField make_initial_field(const RunConfig& cfg) {
  const InitialSpec in = cfg.initial;
  PlasmaParams vp = cfg.params;
  if (in.vtheta > 0.0) vp.theta = in.vtheta;
  if (in.family == "gaussian") {
    const double inv2w2 = 1.0 / (2.0 * in.width * in.width);
    return [in, vp, inv2w2](const PhasePoint& p) {
      const double dx1 = p.x_perp[0] - in.center[0];
      const double dx2 = p.x_perp[1] - in.center[1];
      const Vec3 v{p.v_perp[0], p.v_perp[1], p.v3 - in.v3_shift};
      return in.amplitude * std::exp(-(dx1 * dx1 + dx2 * dx2) * inv2w2) * maxwellian(v, vp);
    };
  }
  return [in, vp](const PhasePoint& p) {
    const Vec3 v{p.v_perp[0], p.v_perp[1], p.v3};
    return in.scale * maxwellian(v, vp);
  };
}

}  // namespace gyrokin
