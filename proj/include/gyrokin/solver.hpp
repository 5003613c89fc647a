#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gyrokin/boltzmann.hpp"
#include "gyrokin/grid.hpp"
#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/landau.hpp"
#include "gyrokin/physics.hpp"

namespace gyrokin {

enum class CollisionModel { None, Boltzmann, FokkerPlanck, Landau };
enum class SplittingScheme { Lie, Strang };
enum class FluxLimiter { Upwind, Muscl };

// Time stepping profile for the reduced transport-collision model.
struct SolverConfig {
  CollisionModel model = CollisionModel::None;
  SplittingScheme splitting = SplittingScheme::Strang;
  FluxLimiter limiter = FluxLimiter::Upwind;
  double dt = 0.0;    // fixed step; <= 0 derives one from the CFL number
  double cfl = 0.45;  // Courant number for the derived step, must be <= 0.9
  double t_final = 1.0;
  int diag_every = 1;      // diagnostics cadence in steps
  int snapshot_every = 0;  // snapshot cadence in steps; 0 keeps endpoints only
  int field_nodes = 32;    // gyrophase nodes for the averaged drift fields
  BoltzmannAvgConfig boltzmann;  // used when model == Boltzmann
  FplConfig landau;              // used when model == Landau
};

void validate_solver_config(const SolverConfig& cfg);

// One diagnostics row.  px and py are the perpendicular momentum components,
// identically zero for any gyrotropic reduced density, kept for a fixed
// column set.  entropy_prod is the configured model's dissipation functional
// (zero for collisionless runs).
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double px = 0.0, py = 0.0, pz = 0.0;
  double ekin = 0.0;
  double entropy = 0.0;
  double larmor_cx = 0.0, larmor_cy = 0.0;
  double larmor_power = 0.0;
  double entropy_prod = 0.0;
  double l2m = 0.0;
};

struct SolverState {
  ReducedDensity g;
  double time = 0.0;
  std::vector<DiagnosticsRecord> series;
};

// Transport coefficients sampled on the grid: the perpendicular drift
// (averaged perp field / B) per (r, y-plane) node, and the parallel
// acceleration (q/m) <E3> per (x3, r, y-plane) node.  Streaming in x3 uses
// the v3 axis values directly.
struct DriftFields {
  std::vector<double> u1, u2;  // size n_r * n_y1 * n_y2
  std::vector<double> a3;      // size n_x3 * n_r * n_y1 * n_y2
  double u1_max = 0.0, u2_max = 0.0, a3_max = 0.0;
};

DriftFields build_drift_fields(const ReducedGrid& grid, const Potential& pot,
                               const PlasmaParams& params, int n_nodes);

// Largest advective step satisfying the per-axis Courant bound
//   dt <= cfl * min(dy/|u|, dx3/V3, dv3/|a3|),
// and the smaller step obtained from the summed outflow rate, which keeps
// the first-order upwind update sign-preserving in all axes at once.
double advect_dt_limit(const ReducedGrid& grid, const DriftFields& df, double cfl);
double advect_dt_positive(const ReducedGrid& grid, const DriftFields& df, double cfl);

// One strong-stability-preserving RK2 step of the conservative finite-volume
// transport in (y1, y2, x3, v3): periodic in y and x3, zero-flux at the v3
// ends, face-upwinded fluxes with an optional MUSCL minmod reconstruction.
// Throws step_error when dt violates the Courant bound.  Total mass
// telescopes exactly.
void advect_step(SolverState& state, double dt, const DriftFields& df,
                 const SolverConfig& cfg);

// Convenience wrapper that rebuilds the drift fields from the potential.
void advect_step(SolverState& state, double dt, const Potential& pot,
                 const SolverConfig& cfg);

// One RK2 step of the configured collision operator.  The relaxation model
// additionally requires dt <= tau / (2 sup(loss rate * tau)); a resulting
// density with a negative part below -1e-12 * max aborts with step_error.
void collide_step(SolverState& state, double dt, const SolverConfig& cfg);

// Diagnostics row for the current state under the configured model.
DiagnosticsRecord measure_diagnostics(const SolverState& state, const SolverConfig& cfg);

// Sinks for the run loop; either may be empty.
struct SolverCallbacks {
  std::function<void(const DiagnosticsRecord&)> on_diagnostics;
  std::function<void(const ReducedDensity&, int id, double time)> on_snapshot;
};

// Project the initial condition, then advance to t_final with the selected
// splitting (Lie: transport then collisions; Strang: half transport around a
// full collision step), emitting diagnostics and snapshots at the configured
// cadence.  A step_error flushes the last completed state as a final
// snapshot before rethrowing.
SolverState run(const SolverConfig& cfg, const ScalarField& initial, const Potential& pot,
                const PlasmaParams& params, std::shared_ptr<const ReducedGrid> grid,
                const GyroQuadratureConfig& proj_cfg, const SolverCallbacks& cb = {});

// Same loop starting from an already-projected density.
SolverState run_from_density(const SolverConfig& cfg, ReducedDensity start,
                             const Potential& pot, const SolverCallbacks& cb = {});

// Guiding-center drift verification.  For each epsilon the fast system
//   dx/dt = v_perp / eps,  dv_perp/dt = (q/m) E_perp + (omega_c/eps) perp(v),
//   dx3/dt = v3,           dv3/dt = (q/m) E3
// is integrated by a kick / exact-gyration / kick splitting with step
// eps * T_c / 64 (T_c the unscaled gyroperiod), the guiding center is
// estimated as the trailing mean of x_perp over one fast gyroperiod, and the
// result is compared against the averaged-drift trajectory
// dy/dt = <perp E>(y, r0) / B integrated with RK4 on the same clock.  The
// reported error per epsilon is the maximum over the trajectory.
struct DriftCheckResult {
  std::vector<double> eps;
  std::vector<double> max_error;
  // Least-squares slope of log(error) against log(eps).
  double observed_order = 0.0;
};

DriftCheckResult drift_check(const PhasePoint& start, const Potential& pot,
                             const PlasmaParams& params, const std::vector<double>& eps_list,
                             double t_final);

}  // namespace gyrokin
