// Reduced transport-collision solver: averaged drift fields, conservative
// upwind and MUSCL advection, Courant guards, collision stepping with
// stability and positivity aborts, Lie and Strang splitting orders, the run
// loop cadence, and the guiding-center drift verification.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "density_helpers.hpp"
#include "doctest.h"
#include "gyrokin/errors.hpp"
#include "gyrokin/solver.hpp"

using namespace gyrokin;
using gyrokin::testing::ConstrainedGaussian;

namespace {

std::shared_ptr<ReducedGrid> make_grid(int n_y1, int n_y2, int n_x3, int n_r, int n_v3,
                                       double L, double L3, double R, double V3) {
  auto g = std::make_shared<ReducedGrid>();
  g->n_y1 = n_y1;
  g->n_y2 = n_y2;
  g->n_x3 = n_x3;
  g->n_r = n_r;
  g->n_v3 = n_v3;
  g->L = L;
  g->L3 = L3;
  g->R_max = R;
  g->V3 = V3;
  return g;
}

double total_mass(const ReducedDensity& g) {
  const ReducedGrid& gr = *g.grid;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    acc += gr.cell_volume(ir) * g.values[idx];
  }
  return acc;
}

double center_of_mass_y1(const ReducedDensity& g) {
  const ReducedGrid& gr = *g.grid;
  double num = 0.0, den = 0.0;
  for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    const double w = gr.cell_volume(ir) * g.values[idx];
    num += w * gr.y1(iy1);
    den += w;
  }
  return num / den;
}

double min_value(const ReducedDensity& g) {
  double m = g.values.empty() ? 0.0 : g.values[0];
  for (double v : g.values) m = std::min(m, v);
  return m;
}

// Gaussian bump in the y plane with hard-truncated tails, times a radial
// Maxwell profile, so the support stays strictly away from the periodic seam.
ReducedDensity truncated_bump(std::shared_ptr<const ReducedGrid> grid,
                              const PlasmaParams& params, double sy, double cut) {
  ReducedDensity d = make_density(grid, params);
  const ReducedGrid& gr = *grid;
  const double c1 = 0.5 * gr.L, c2 = 0.5 * gr.L;
  for (std::size_t idx = 0; idx < d.values.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    const double u1 = gr.y1(iy1) - c1, u2 = gr.y2(iy2) - c2;
    const double v = std::exp(-0.5 * (u1 * u1 + u2 * u2) / (sy * sy)) *
                     maxwellian_rv(gr.r(ir), gr.v3(iv3), params);
    d.values[idx] = v > cut ? v : 0.0;
  }
  return d;
}

double l1_difference(const ReducedDensity& a, const ReducedDensity& b) {
  const ReducedGrid& gr = *a.grid;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < a.values.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    acc += gr.cell_volume(ir) * std::abs(a.values[idx] - b.values[idx]);
  }
  return acc;
}

}  // namespace

TEST_CASE("averaged drift fields reproduce uniform and linear electric fields") {
  auto grid = make_grid(6, 5, 2, 4, 3, 4.0, 2.0, 2.5, 2.0);
  PlasmaParams params;
  params.q = 1.5;
  params.m = 1.2;
  params.B = 2.0;

  Potential uni;
  uni.family = PotentialFamily::UniformGradient;
  uni.gradient = {0.3, -0.2, 0.4};
  const DriftFields df = build_drift_fields(*grid, uni, params, 16);
  // E = -gradient; u = (E2, -E1)/B; a3 = (q/m) E3, all constant.
  const double u1 = 0.2 / params.B, u2 = 0.3 / params.B;
  const double a3 = params.q / params.m * (-0.4);
  for (double v : df.u1) CHECK(std::abs(v - u1) <= 1e-13);
  for (double v : df.u2) CHECK(std::abs(v - u2) <= 1e-13);
  for (double v : df.a3) CHECK(std::abs(v - a3) <= 1e-13);
  CHECK(std::abs(df.u1_max - std::abs(u1)) <= 1e-13);
  CHECK(std::abs(df.a3_max - std::abs(a3)) <= 1e-13);

  // A linear field averages to its value at the guiding center, independent
  // of the gyration radius.
  Potential har;
  har.family = PotentialFamily::Harmonic;
  har.curvature = {0.7, -0.4, 0.0};
  const DriftFields dh = build_drift_fields(*grid, har, params, 24);
  const std::size_t plane = grid->slice_size();
  for (int ir = 0; ir < grid->n_r; ++ir) {
    for (int iy1 = 0; iy1 < grid->n_y1; ++iy1) {
      for (int iy2 = 0; iy2 < grid->n_y2; ++iy2) {
        const std::size_t k = (static_cast<std::size_t>(ir) * grid->n_y1 + iy1) * grid->n_y2 + iy2;
        const double e1 = -0.7 * grid->y1(iy1);
        const double e2 = 0.4 * grid->y2(iy2);
        CHECK(std::abs(dh.u1[k] - e2 / params.B) <= 1e-12);
        CHECK(std::abs(dh.u2[k] + e1 / params.B) <= 1e-12);
        CHECK(k < plane * grid->n_r);
      }
    }
  }
}

TEST_CASE("constant drift translates the center of mass exactly") {
  auto grid = make_grid(24, 6, 1, 3, 3, 5.0, 1.0, 2.0, 2.0);
  PlasmaParams params;
  params.B = 2.0;
  Potential pot;
  pot.family = PotentialFamily::UniformGradient;
  pot.gradient = {0.0, -0.3 * params.B, 0.0};  // u = (0.3, 0)

  SolverConfig cfg;
  SolverState st;
  st.g = truncated_bump(grid, params, 0.25, 1e-12);
  st.time = 0.0;
  const double mass0 = total_mass(st.g);
  const double com0 = center_of_mass_y1(st.g);
  CHECK(mass0 > 0.0);

  const DriftFields df = build_drift_fields(*grid, pot, params, 16);
  const double dt = 0.2;
  CHECK(dt <= advect_dt_limit(*grid, df, cfg.cfl));
  advect_step(st, dt, df, cfg);

  CHECK(std::abs(total_mass(st.g) - mass0) <= 1e-13 * mass0);
  CHECK(std::abs(center_of_mass_y1(st.g) - com0 - 0.3 * dt) <= 1e-12 * grid->L);
  CHECK(min_value(st.g) >= 0.0);
  CHECK(std::abs(st.time - dt) <= 1e-15);
}

TEST_CASE("advection conserves mass for both limiters under a structured field") {
  auto grid = make_grid(12, 12, 4, 4, 6, 4.0, 2.0, 2.5, 2.5);
  PlasmaParams params;
  params.B = 2.0;
  Potential pot;
  pot.family = PotentialFamily::Separable;
  pot.amp = 0.4;
  pot.k = {2.0 * 3.14159265358979324 / 4.0, 3.14159265358979324 / 2.0};
  pot.shift = 0.3;
  pot.amp3 = 0.3;
  pot.k3 = 3.14159265358979324;  // periodic over L3 = 2

  ConstrainedGaussian cg;
  cg.y0 = {2.0, 2.0};
  cg.sy = 0.7;
  cg.a = 1.2;
  const DriftFields df = build_drift_fields(*grid, pot, params, 16);
  for (FluxLimiter lim : {FluxLimiter::Upwind, FluxLimiter::Muscl}) {
    SolverConfig cfg;
    cfg.limiter = lim;
    SolverState st;
    st.g = cg.sample(grid, params);
    const double mass0 = total_mass(st.g);
    const double dt = advect_dt_positive(*grid, df, cfg.cfl);
    CHECK(dt > 0.0);
    for (int s = 0; s < 6; ++s) advect_step(st, dt, df, cfg);
    CHECK(std::abs(total_mass(st.g) - mass0) <= 1e-12 * mass0);
    if (lim == FluxLimiter::Upwind) CHECK(min_value(st.g) >= 0.0);
  }
}

TEST_CASE("advection rejects steps beyond the Courant bound") {
  auto grid = make_grid(8, 8, 1, 3, 3, 4.0, 1.0, 2.0, 2.0);
  PlasmaParams params;
  Potential pot;
  pot.family = PotentialFamily::UniformGradient;
  pot.gradient = {0.5, -0.5, 0.0};
  const DriftFields df = build_drift_fields(*grid, pot, params, 16);
  SolverConfig cfg;
  SolverState st;
  st.g = maxwellian_density(grid, params, 1.0);
  const double limit = advect_dt_limit(*grid, df, cfg.cfl);
  CHECK(limit > 0.0);
  CHECK(advect_dt_positive(*grid, df, cfg.cfl) <= limit * (1.0 + 1e-12));
  CHECK_THROWS_AS(advect_step(st, 3.0 * limit, df, cfg), step_error);
  CHECK_THROWS_AS(advect_step(st, 0.0, df, cfg), step_error);
}

TEST_CASE("MUSCL reconstruction beats first-order upwind on a smooth profile") {
  auto grid = make_grid(32, 4, 1, 3, 3, 5.0, 1.0, 2.0, 2.0);
  PlasmaParams params;
  params.B = 2.0;
  Potential pot;
  pot.family = PotentialFamily::UniformGradient;
  pot.gradient = {0.0, -0.3 * params.B, 0.0};  // u = (0.3, 0)
  const DriftFields df = build_drift_fields(*grid, pot, params, 16);

  const double sy = 0.45, t_total = 1.0, dt = 0.1;
  auto profile = [&](double y1) {
    // Nearest periodic image of the translated Gaussian.
    double best = 0.0;
    for (int im = -1; im <= 1; ++im) {
      const double u = y1 - 2.5 - 0.3 * t_total + im * grid->L;
      best += std::exp(-0.5 * u * u / (sy * sy));
    }
    return best;
  };

  double errs[2];
  int slot = 0;
  for (FluxLimiter lim : {FluxLimiter::Upwind, FluxLimiter::Muscl}) {
    SolverConfig cfg;
    cfg.limiter = lim;
    SolverState st;
    st.g = make_density(grid, params);
    for (std::size_t idx = 0; idx < st.g.values.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      grid->decompose(idx, ix3, ir, iv3, iy1, iy2);
      st.g.values[idx] = std::exp(-0.5 * (grid->y1(iy1) - 2.5) * (grid->y1(iy1) - 2.5) /
                                  (sy * sy));
    }
    for (int s = 0; s < 10; ++s) advect_step(st, dt, df, cfg);
    ReducedDensity exact = make_density(grid, params);
    for (std::size_t idx = 0; idx < exact.values.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      grid->decompose(idx, ix3, ir, iv3, iy1, iy2);
      exact.values[idx] = profile(grid->y1(iy1));
    }
    errs[slot++] = l1_difference(st.g, exact);
  }
  CHECK(errs[0] > 0.0);
  CHECK(errs[1] <= 0.45 * errs[0]);
}

TEST_CASE("relaxation collisions drive the density toward the Maxwellian") {
  auto grid = make_grid(8, 8, 1, 6, 8, 4.0, 1.0, 3.0, 3.0);
  PlasmaParams params;
  params.theta = 0.8;
  SolverConfig cfg;
  cfg.model = CollisionModel::Boltzmann;
  cfg.boltzmann.cross_section =
      make_cross_section(CrossSectionFamily::PowerLaw, 1.0, -0.5, 0.4, 0.0, 60.0);

  ConstrainedGaussian cg;
  cg.amplitude = 0.8;
  cg.y0 = {2.0, 2.0};
  cg.sy = 0.7;
  cg.a = 1.5;
  cg.v3_shift = 0.5;
  SolverState st;
  st.g = cg.sample(grid, params);
  const double mass0 = total_mass(st.g);
  double l2_prev = l2_maxwellian_distance(st.g);
  double ent_prev = entropy_functional(st.g);
  for (int s = 0; s < 8; ++s) {
    collide_step(st, 0.005, cfg);
    const double l2 = l2_maxwellian_distance(st.g);
    const double ent = entropy_functional(st.g);
    CHECK(l2 < l2_prev);
    CHECK(ent <= ent_prev + 1e-12 * std::abs(ent_prev));
    l2_prev = l2;
    ent_prev = ent;
  }
  CHECK(std::abs(total_mass(st.g) - mass0) <= 1e-12 * mass0);
  CHECK(min_value(st.g) >= 0.0);

  // Far beyond the relaxation stability bound the step must refuse to run.
  CHECK_THROWS_AS(collide_step(st, 1e4, cfg), step_error);
}

TEST_CASE("Fokker-Planck and Landau collision steps conserve mass") {
  auto grid = make_grid(6, 6, 1, 6, 8, 4.0, 1.0, 3.0, 3.0);
  PlasmaParams params;
  params.B = 2.2;
  ConstrainedGaussian cg;
  cg.y0 = {2.0, 2.0};
  cg.sy = 0.7;
  cg.a = 1.3;

  SolverConfig fp;
  fp.model = CollisionModel::FokkerPlanck;
  SolverState st;
  st.g = cg.sample(grid, params);
  double mass0 = total_mass(st.g);
  collide_step(st, 0.01, fp);
  collide_step(st, 0.01, fp);
  CHECK(std::abs(total_mass(st.g) - mass0) <= 1e-11 * mass0);

  SolverConfig fpl;
  fpl.model = CollisionModel::Landau;
  fpl.landau.cross_section =
      make_cross_section(CrossSectionFamily::PowerLaw, 1.0, -0.5, 0.4, 0.0, 60.0);
  SolverState st2;
  st2.g = cg.sample(grid, params);
  mass0 = total_mass(st2.g);
  collide_step(st2, 0.01, fpl);
  CHECK(std::abs(total_mass(st2.g) - mass0) <= 1e-11 * mass0);
}

TEST_CASE("collision step aborts when the density leaves the positive cone") {
  auto grid = make_grid(4, 4, 1, 6, 8, 4.0, 1.0, 3.0, 3.0);
  PlasmaParams params;
  SolverConfig cfg;
  cfg.model = CollisionModel::FokkerPlanck;
  SolverState st;
  st.g = make_density(grid, params);
  // A single spike diffuses so strongly that a huge step overshoots negative.
  st.g.values[grid->index(0, 3, 4, 2, 2)] = 1.0;
  CHECK_THROWS_AS(collide_step(st, 1e3, cfg), step_error);
}

TEST_CASE("Lie splitting is first order and Strang second order in the step") {
  auto grid = make_grid(8, 8, 1, 6, 8, 4.0, 1.0, 3.0, 3.0);
  PlasmaParams params;
  params.B = 2.0;
  params.theta = 0.7;
  params.tau = 0.6;
  Potential pot;
  pot.family = PotentialFamily::Separable;
  pot.amp = 0.25;
  pot.k = {2.0 * 3.14159265358979324 / 4.0, 2.0 * 3.14159265358979324 / 4.0};
  pot.shift = 0.4;
  ConstrainedGaussian cg;
  cg.amplitude = 0.9;
  cg.y0 = {2.0, 2.0};
  cg.sy = 0.6;
  cg.a = 1.3;
  cg.v3_shift = 0.3;

  auto run_with = [&](SplittingScheme scheme, double dt) {
    SolverConfig cfg;
    cfg.model = CollisionModel::Boltzmann;
    cfg.boltzmann.cross_section =
        make_cross_section(CrossSectionFamily::PowerLaw, 0.8, -0.5, 0.4, 0.0, 60.0);
    cfg.splitting = scheme;
    cfg.dt = dt;
    cfg.t_final = 0.32;
    cfg.diag_every = 1000;
    return run_from_density(cfg, cg.sample(grid, params), pot, {});
  };

  const SolverState ref = run_with(SplittingScheme::Strang, 0.005);
  double lie[3], strang[3];
  const double dts[3] = {0.08, 0.04, 0.02};
  for (int i = 0; i < 3; ++i) {
    lie[i] = l1_difference(run_with(SplittingScheme::Lie, dts[i]).g, ref.g);
    strang[i] = l1_difference(run_with(SplittingScheme::Strang, dts[i]).g, ref.g);
  }
  for (int i = 0; i < 3; ++i) CHECK(lie[i] > 0.0);
  CHECK(lie[0] / lie[1] >= 1.55);
  CHECK(lie[0] / lie[1] <= 2.9);
  CHECK(lie[1] / lie[2] >= 1.6);
  CHECK(lie[1] / lie[2] <= 2.7);
  CHECK(strang[0] / strang[1] >= 2.8);
  CHECK(strang[0] / strang[1] <= 5.6);
  CHECK(strang[0] < 0.5 * lie[0]);
}

TEST_CASE("run loop emits diagnostics and snapshots at the configured cadence") {
  auto grid = make_grid(8, 8, 1, 6, 8, 4.0, 1.0, 3.0, 3.0);
  PlasmaParams params;
  SolverConfig cfg;
  cfg.model = CollisionModel::Boltzmann;
  cfg.boltzmann.cross_section =
      make_cross_section(CrossSectionFamily::PowerLaw, 1.0, -0.5, 0.4, 0.0, 60.0);
  cfg.dt = 0.01;
  cfg.t_final = 0.1;
  cfg.diag_every = 2;
  cfg.snapshot_every = 4;
  Potential pot;  // no field: pure relaxation

  ConstrainedGaussian cg;
  cg.amplitude = 0.7;
  cg.y0 = {2.0, 2.0};
  cg.sy = 0.7;
  cg.a = 1.4;
  cg.v3_shift = 0.4;

  std::vector<double> snap_times;
  std::vector<int> snap_ids;
  int diag_calls = 0;
  SolverCallbacks cb;
  cb.on_diagnostics = [&](const DiagnosticsRecord&) { ++diag_calls; };
  cb.on_snapshot = [&](const ReducedDensity&, int id, double time) {
    snap_ids.push_back(id);
    snap_times.push_back(time);
  };

  const SolverState st = run_from_density(cfg, cg.sample(grid, params), pot, cb);

  REQUIRE(st.series.size() == 6);  // steps 0, 2, 4, 6, 8, 10
  CHECK(diag_calls == 6);
  CHECK(st.series.front().time == 0.0);
  CHECK(std::abs(st.series.back().time - 0.1) <= 1e-12);
  REQUIRE(snap_ids.size() == 4);  // initial, steps 4 and 8, final
  for (int i = 0; i < 4; ++i) CHECK(snap_ids[i] == i);
  CHECK(std::abs(snap_times[1] - 0.04) <= 1e-12);
  CHECK(std::abs(snap_times[3] - 0.1) <= 1e-12);

  const double mass0 = st.series.front().mass;
  for (std::size_t i = 0; i < st.series.size(); ++i) {
    const DiagnosticsRecord& r = st.series[i];
    CHECK(std::abs(r.mass - mass0) <= 1e-10 * mass0);
    CHECK(r.px == 0.0);
    CHECK(r.py == 0.0);
    CHECK(r.entropy_prod < 0.0);
    if (i > 0) {
      CHECK(r.time > st.series[i - 1].time);
      CHECK(r.entropy <= st.series[i - 1].entropy + 1e-12 * std::abs(st.series[i - 1].entropy));
      CHECK(r.l2m < st.series[i - 1].l2m);
    }
  }
}

TEST_CASE("guiding-center error vanishes without a field and is first order with one") {
  PlasmaParams params;
  params.B = 1.5;
  InvariantCoords inv;
  inv.y = {0.3, -0.4};
  inv.x3 = 0.0;
  inv.r = 0.7;
  inv.v3 = 0.2;
  const PhasePoint start = from_invariants(inv, Gyrophase{0.3}, params.omega_c());

  Potential none;
  const DriftCheckResult zero = drift_check(start, none, params, {0.1, 0.05}, 1.0);
  REQUIRE(zero.max_error.size() == 2);
  for (double e : zero.max_error) CHECK(e <= 1e-9);

  Potential pot;
  pot.family = PotentialFamily::Separable;
  pot.amp = 0.3;
  pot.k = {1.1, 0.6};
  pot.shift = 0.2;
  const DriftCheckResult res =
      drift_check(start, pot, params, {1e-1, 5e-2, 2.5e-2}, 1.5);
  REQUIRE(res.max_error.size() == 3);
  CHECK(res.max_error[0] > res.max_error[1]);
  CHECK(res.max_error[1] > res.max_error[2]);
  CHECK(res.observed_order >= 0.9);
}

TEST_CASE("solver configuration rejections name the offending field") {
  SolverConfig cfg;
  cfg.cfl = 1.2;
  CHECK_THROWS_AS(validate_solver_config(cfg), config_error);
  cfg.cfl = 0.45;
  cfg.t_final = 0.0;
  CHECK_THROWS_AS(validate_solver_config(cfg), config_error);
  cfg.t_final = 1.0;
  cfg.diag_every = 0;
  CHECK_THROWS_AS(validate_solver_config(cfg), config_error);
  cfg.diag_every = 1;
  cfg.snapshot_every = -1;
  CHECK_THROWS_AS(validate_solver_config(cfg), config_error);
  cfg.snapshot_every = 0;
  cfg.field_nodes = 2;
  CHECK_THROWS_AS(validate_solver_config(cfg), config_error);
  cfg.field_nodes = 32;
  validate_solver_config(cfg);  // restored profile passes
}
