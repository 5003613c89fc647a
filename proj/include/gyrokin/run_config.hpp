#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "json.hpp"

#include "gyrokin/grid.hpp"
#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/solver.hpp"

namespace gyrokin {

// Initial condition families for simulation runs:
//   maxwellian: scale * Maxwellian(vtheta), uniform in space;
//   gaussian:   amplitude * exp(-|x_perp - center|^2 / (2 width^2))
//               * Maxwellian(vtheta) shifted by v3_shift in v3.
// vtheta <= 0 means the plasma temperature.
struct InitialSpec {
  std::string family = "maxwellian";
  double scale = 1.0;
  double vtheta = 0.0;
  double amplitude = 1.0;
  Vec2 center{0.0, 0.0};
  double width = 0.2;
  double v3_shift = 0.0;
};

// Fully validated simulation setup.  Every field below maps to a JSON
// section; violations are rejected with the offending field path in the
// error message before any compute starts.
struct RunConfig {
  PlasmaParams params;
  Potential potential;
  std::shared_ptr<const ReducedGrid> grid;
  SolverConfig solver;  // carries the collision configs and cross section
  GyroQuadratureConfig projection;
  InitialSpec initial;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Full-coordinate initial density selected by cfg.initial.
ScalarField make_initial_field(const RunConfig& cfg);

}  // namespace gyrokin
