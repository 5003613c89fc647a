#include "gyrokin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gyrokin/errors.hpp"
#include "gyrokin/fokker_planck.hpp"
#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/threading.hpp"

namespace gyrokin {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Adds the conservative flux difference of one transported axis to the rate.
// The axis has n cells at stride `stride`; lines are enumerated by an outer
// block and an inner offset so that every grid node lies on exactly one
// line, which keeps the threaded accumulation race-free.  speed(outer,
// inner, i) returns the cell-centered transport speed; faces carry the mean
// of the adjacent cell speeds and upwind the reconstructed states.
template <typename SpeedFn>
void axis_advect_add(const std::vector<double>& g, std::vector<double>& rate, int n,
                     std::size_t stride, double h, bool periodic, FluxLimiter lim,
                     SpeedFn&& speed) {
  if (n < 2) return;  // a single cell cannot transport anything
  const std::size_t lines = g.size() / static_cast<std::size_t>(n);
  parallel_for(lines, [&](std::size_t lb, std::size_t le) {
    std::vector<double> gl(n), sp(n), slope(n, 0.0), flux(n + 1);
    for (std::size_t lin = lb; lin < le; ++lin) {
      const std::size_t outer = lin / stride;
      const std::size_t inner = lin % stride;
      const std::size_t base = outer * (static_cast<std::size_t>(n) * stride) + inner;
      for (int i = 0; i < n; ++i) {
        gl[i] = g[base + static_cast<std::size_t>(i) * stride];
        sp[i] = speed(outer, inner, i);
      }
      if (lim == FluxLimiter::Muscl) {
        for (int i = 0; i < n; ++i) {
          const bool interior = periodic || (i > 0 && i + 1 < n);
          if (!interior) {
            slope[i] = 0.0;
            continue;
          }
          const int im = (i - 1 + n) % n;
          const int ip = (i + 1) % n;
          slope[i] = minmod(gl[i] - gl[im], gl[ip] - gl[i]);
        }
      }
      // flux[f] sits between cells f-1 and f; the wrap face is duplicated at
      // both ends so every cell update reads flux[i + 1] - flux[i].
      for (int f = 0; f <= n; ++f) {
        if (!periodic && (f == 0 || f == n)) {
          flux[f] = 0.0;
          continue;
        }
        const int left = (f - 1 + n) % n;
        const int right = f % n;
        const double c = 0.5 * (sp[left] + sp[right]);
        double qup;
        if (lim == FluxLimiter::Muscl) {
          qup = c >= 0.0 ? gl[left] + 0.5 * slope[left] : gl[right] - 0.5 * slope[right];
        } else {
          qup = c >= 0.0 ? gl[left] : gl[right];
        }
        flux[f] = c * qup;
      }
      for (int i = 0; i < n; ++i) {
        rate[base + static_cast<std::size_t>(i) * stride] -= (flux[i + 1] - flux[i]) / h;
      }
    }
  });
}

// Full transport rate -div(u g) over the four transported axes.
void advection_rate(const ReducedDensity& g, const DriftFields& df, FluxLimiter lim,
                    std::vector<double>& rate) {
  const ReducedGrid& gr = *g.grid;
  std::fill(rate.begin(), rate.end(), 0.0);
  const std::size_t plane = gr.slice_size();
  const int n_y1 = gr.n_y1, n_y2 = gr.n_y2, n_v3 = gr.n_v3, n_r = gr.n_r;

  axis_advect_add(g.values, rate, gr.n_y1, static_cast<std::size_t>(n_y2), gr.dy1(), true,
                  lim, [&](std::size_t outer, std::size_t inner, int i) {
                    const int ir = static_cast<int>(outer / n_v3) % n_r;
                    return df.u1[(static_cast<std::size_t>(ir) * n_y1 + i) * n_y2 + inner];
                  });
  axis_advect_add(g.values, rate, gr.n_y2, std::size_t{1}, gr.dy2(), true, lim,
                  [&](std::size_t outer, std::size_t, int i) {
                    const int iy1 = static_cast<int>(outer % n_y1);
                    const int ir = static_cast<int>(outer / (static_cast<std::size_t>(n_y1) *
                                                             n_v3)) %
                                   n_r;
                    return df.u2[(static_cast<std::size_t>(ir) * n_y1 + iy1) * n_y2 + i];
                  });
  axis_advect_add(g.values, rate, gr.n_x3, static_cast<std::size_t>(n_r) * n_v3 * plane,
                  gr.dx3(), true, lim, [&](std::size_t, std::size_t inner, int) {
                    const int iv3 = static_cast<int>((inner / plane) % n_v3);
                    return gr.v3(iv3);
                  });
  axis_advect_add(g.values, rate, gr.n_v3, plane, gr.dv3(), false, lim,
                  [&](std::size_t outer, std::size_t inner, int) {
                    return df.a3[outer * plane + inner];
                  });
}

struct AxisSpeedSummary {
  double u1, u2, vx3, a3;
};

AxisSpeedSummary speed_summary(const ReducedGrid& grid, const DriftFields& df) {
  double vx3 = 0.0;
  for (int i = 0; i < grid.n_v3; ++i) vx3 = std::max(vx3, std::abs(grid.v3(i)));
  return {df.u1_max, df.u2_max, vx3, df.a3_max};
}

std::vector<double> collision_rate(const ReducedDensity& g, const SolverConfig& cfg) {
  switch (cfg.model) {
    case CollisionModel::Boltzmann:
      return apply_qb_avg(g, cfg.boltzmann);
    case CollisionModel::FokkerPlanck:
      return apply_qfp_avg(g);
    case CollisionModel::Landau:
      return apply_qfpl_avg(g, cfg.landau);
    case CollisionModel::None:
      break;
  }
  return std::vector<double>(g.values.size(), 0.0);
}

double boltzmann_dt_bound(const ReducedDensity& g, const SolverConfig& cfg) {
  const auto lam = qb_loss_coefficient(*g.grid, g.params, cfg.boltzmann);
  const double s0 = g.params.tau * max_abs(lam);
  if (s0 <= 0.0) return std::numeric_limits<double>::infinity();
  return g.params.tau / (2.0 * s0);
}

void check_positivity(const std::vector<double>& v, const char* where) {
  double mx = 0.0, mn = 0.0;
  for (double x : v) {
    mx = std::max(mx, x);
    mn = std::min(mn, x);
  }
  if (mn < -1e-12 * std::max(mx, 1e-300)) {
    throw step_error(std::string(where) +
                     ": density developed a negative part beyond tolerance (min " +
                     std::to_string(mn) + ", max " + std::to_string(mx) + ")");
  }
}

DiagnosticsRecord measure_impl(const ReducedDensity& g, double time, const SolverConfig& cfg) {
  DiagnosticsRecord d;
  d.time = time;
  d.mass = mass_functional(g);
  d.px = 0.0;  // gyrotropic densities carry no mean perpendicular momentum
  d.py = 0.0;
  d.pz = momentum_z_functional(g);
  d.ekin = kinetic_energy_functional(g);
  d.entropy = entropy_functional(g);
  const Vec2 lc = larmor_center_functional(g);
  d.larmor_cx = lc[0];
  d.larmor_cy = lc[1];
  d.larmor_power = larmor_power_functional(g);
  switch (cfg.model) {
    case CollisionModel::Boltzmann:
      d.entropy_prod = qb_entropy_production(g, cfg.boltzmann);
      break;
    case CollisionModel::FokkerPlanck:
      d.entropy_prod = fp_dissipation(g);
      break;
    case CollisionModel::Landau:
      d.entropy_prod = fpl_entropy_production(g, cfg.landau);
      break;
    case CollisionModel::None:
      d.entropy_prod = 0.0;
      break;
  }
  d.l2m = l2_maxwellian_distance(g);
  return d;
}

}  // namespace

void validate_solver_config(const SolverConfig& cfg) {
  if (!(cfg.cfl > 0.0) || cfg.cfl > 0.9) {
    throw config_error("solver.cfl: must be in (0, 0.9]");
  }
  if (!(cfg.t_final > 0.0)) throw config_error("solver.t_final: must be positive");
  if (cfg.dt < 0.0 || !std::isfinite(cfg.dt)) {
    throw config_error("solver.dt: must be zero (derive from CFL) or positive");
  }
  if (cfg.diag_every < 1) throw config_error("solver.diag_every: must be at least 1");
  if (cfg.snapshot_every < 0) throw config_error("solver.snapshot_every: must be non-negative");
  if (cfg.field_nodes < 4) throw config_error("solver.field_nodes: must be at least 4");
}

DriftFields build_drift_fields(const ReducedGrid& grid, const Potential& pot,
                               const PlasmaParams& params, int n_nodes) {
  DriftFields df;
  const double wc = params.omega_c();
  const std::size_t plane = grid.slice_size();
  df.u1.assign(static_cast<std::size_t>(grid.n_r) * plane, 0.0);
  df.u2.assign(static_cast<std::size_t>(grid.n_r) * plane, 0.0);
  df.a3.assign(static_cast<std::size_t>(grid.n_x3) * grid.n_r * plane, 0.0);

  parallel_for(static_cast<std::size_t>(grid.n_r) * plane, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const int iy2 = static_cast<int>(k % grid.n_y2);
      const int iy1 = static_cast<int>((k / grid.n_y2) % grid.n_y1);
      const int ir = static_cast<int>(k / plane);
      const InvariantCoords inv{{grid.y1(iy1), grid.y2(iy2)}, 0.0, grid.r(ir), 0.0};
      const PhasePoint p = from_invariants(inv, Gyrophase{0.0}, wc);
      const AveragedField f = averaged_field_components(p, pot, params, n_nodes);
      df.u1[k] = f.eperp_avg[0] / params.B;
      df.u2[k] = f.eperp_avg[1] / params.B;
      for (int ix3 = 0; ix3 < grid.n_x3; ++ix3) {
        InvariantCoords inv3 = inv;
        inv3.x3 = grid.x3(ix3);
        const PhasePoint p3 = from_invariants(inv3, Gyrophase{0.0}, wc);
        const AveragedField f3 = averaged_field_components(p3, pot, params, n_nodes);
        df.a3[static_cast<std::size_t>(ix3) * grid.n_r * plane + k] =
            params.q / params.m * f3.e3_avg;
      }
    }
  });
  df.u1_max = max_abs(df.u1);
  df.u2_max = max_abs(df.u2);
  df.a3_max = max_abs(df.a3);
  return df;
}

double advect_dt_limit(const ReducedGrid& grid, const DriftFields& df, double cfl) {
  const AxisSpeedSummary s = speed_summary(grid, df);
  double limit = std::numeric_limits<double>::infinity();
  auto bind = [&](int n, double h, double umax) {
    if (n > 1 && umax > 0.0) limit = std::min(limit, h / umax);
  };
  bind(grid.n_y1, grid.dy1(), s.u1);
  bind(grid.n_y2, grid.dy2(), s.u2);
  bind(grid.n_x3, grid.dx3(), s.vx3);
  bind(grid.n_v3, grid.dv3(), s.a3);
  return cfl * limit;
}

double advect_dt_positive(const ReducedGrid& grid, const DriftFields& df, double cfl) {
  const AxisSpeedSummary s = speed_summary(grid, df);
  double outflow = 0.0;
  auto add = [&](int n, double h, double umax) {
    if (n > 1) outflow += umax / h;
  };
  add(grid.n_y1, grid.dy1(), s.u1);
  add(grid.n_y2, grid.dy2(), s.u2);
  add(grid.n_x3, grid.dx3(), s.vx3);
  add(grid.n_v3, grid.dv3(), s.a3);
  if (outflow <= 0.0) return std::numeric_limits<double>::infinity();
  return cfl / outflow;
}

void advect_step(SolverState& state, double dt, const DriftFields& df,
                 const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw step_error("advect_step: dt must be positive");
  const ReducedGrid& grid = *state.g.grid;
  const double limit = advect_dt_limit(grid, df, cfg.cfl);
  if (dt > limit * (1.0 + 1e-12)) {
    throw step_error("advect_step: dt " + std::to_string(dt) +
                     " exceeds the Courant bound " + std::to_string(limit));
  }
  const std::size_t n = state.g.values.size();
  std::vector<double> rate(n);
  ReducedDensity stage = state.g;

  advection_rate(state.g, df, cfg.limiter, rate);
  for (std::size_t i = 0; i < n; ++i) stage.values[i] = state.g.values[i] + dt * rate[i];
  advection_rate(stage, df, cfg.limiter, rate);
  for (std::size_t i = 0; i < n; ++i) {
    state.g.values[i] = 0.5 * (state.g.values[i] + stage.values[i] + dt * rate[i]);
  }
  state.time += dt;
}

void advect_step(SolverState& state, double dt, const Potential& pot,
                 const SolverConfig& cfg) {
  const DriftFields df =
      build_drift_fields(*state.g.grid, pot, state.g.params, cfg.field_nodes);
  advect_step(state, dt, df, cfg);
}

void collide_step(SolverState& state, double dt, const SolverConfig& cfg) {
  if (cfg.model == CollisionModel::None) return;
  if (!(dt > 0.0)) throw step_error("collide_step: dt must be positive");
  if (cfg.model == CollisionModel::Boltzmann) {
    const double bound = boltzmann_dt_bound(state.g, cfg);
    if (dt > bound * (1.0 + 1e-12)) {
      throw step_error("collide_step: dt " + std::to_string(dt) +
                       " exceeds the relaxation stability bound " + std::to_string(bound));
    }
  }
  const std::size_t n = state.g.values.size();
  ReducedDensity stage = state.g;
  std::vector<double> rate = collision_rate(state.g, cfg);
  for (std::size_t i = 0; i < n; ++i) stage.values[i] = state.g.values[i] + dt * rate[i];
  rate = collision_rate(stage, cfg);
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = 0.5 * (state.g.values[i] + stage.values[i] + dt * rate[i]);
  }
  check_positivity(next, "collide_step");
  state.g.values = std::move(next);
}

DiagnosticsRecord measure_diagnostics(const SolverState& state, const SolverConfig& cfg) {
  return measure_impl(state.g, state.time, cfg);
}

SolverState run_from_density(const SolverConfig& cfg, ReducedDensity start,
                             const Potential& pot, const SolverCallbacks& cb) {
  validate_solver_config(cfg);
  validate_grid(*start.grid);

  SolverState st;
  st.g = std::move(start);
  st.time = 0.0;
  const ReducedGrid& grid = *st.g.grid;
  const DriftFields df = build_drift_fields(grid, pot, st.g.params, cfg.field_nodes);

  double dt = cfg.dt;
  if (dt <= 0.0) {
    dt = advect_dt_positive(grid, df, cfg.cfl);
    if (cfg.model == CollisionModel::Boltzmann) {
      dt = std::min(dt, boltzmann_dt_bound(st.g, cfg));
    }
    if (!std::isfinite(dt)) dt = cfg.t_final;
    dt = std::min(dt, cfg.t_final);
  }
  const int n_steps = std::max(1, static_cast<int>(std::ceil(cfg.t_final / dt - 1e-9)));

  int snapshot_id = 0;
  auto emit_diag = [&]() {
    const DiagnosticsRecord rec = measure_impl(st.g, st.time, cfg);
    st.series.push_back(rec);
    if (cb.on_diagnostics) cb.on_diagnostics(rec);
  };
  auto emit_snapshot = [&]() {
    if (cb.on_snapshot) cb.on_snapshot(st.g, snapshot_id, st.time);
    ++snapshot_id;
  };

  emit_diag();
  if (cfg.snapshot_every > 0) emit_snapshot();

  try {
    for (int step = 1; step <= n_steps; ++step) {
      const double h = step == n_steps ? cfg.t_final - (n_steps - 1) * dt : dt;
      // Sub-steps run on a copy so a failed step leaves the last completed
      // state intact for the abort snapshot.
      SolverState trial;
      trial.g = st.g;
      trial.time = st.time;
      if (cfg.splitting == SplittingScheme::Strang) {
        advect_step(trial, 0.5 * h, df, cfg);
        collide_step(trial, h, cfg);
        advect_step(trial, 0.5 * h, df, cfg);
      } else {
        advect_step(trial, h, df, cfg);
        collide_step(trial, h, cfg);
      }
      st.g = std::move(trial.g);
      st.time += h;
      if (step % cfg.diag_every == 0 || step == n_steps) emit_diag();
      if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 && step != n_steps) {
        emit_snapshot();
      }
      if (step == n_steps) emit_snapshot();
    }
  } catch (const step_error&) {
    emit_snapshot();  // flush the last completed state
    throw;
  }
  return st;
}

SolverState run(const SolverConfig& cfg, const ScalarField& initial, const Potential& pot,
                const PlasmaParams& params, std::shared_ptr<const ReducedGrid> grid,
                const GyroQuadratureConfig& proj_cfg, const SolverCallbacks& cb) {
  ReducedDensity g0 = project_initial(initial, std::move(grid), params, proj_cfg);
  return run_from_density(cfg, std::move(g0), pot, cb);
}

namespace {

struct FastState {
  Vec2 x{0.0, 0.0};
  double x3 = 0.0;
  Vec2 v{0.0, 0.0};
  double v3 = 0.0;
};

// Kick / exact-gyration / kick step of the scaled characteristics.  The
// gyration stage applies the exact rotation of the fast angular motion, so
// with a vanishing field the orbit is an exact circle and the windowed
// guiding-center estimate reproduces the center to rounding.
void fast_step(FastState& s, double h, double omega_eff, const Potential& pot,
               const PlasmaParams& params, double wc) {
  const double qm = params.q / params.m;
  auto kick = [&](double dth) {
    const Vec3 e = efield({s.x[0], s.x[1], s.x3}, pot);
    s.v[0] += dth * qm * e[0];
    s.v[1] += dth * qm * e[1];
    s.v3 += dth * qm * e[2];
  };
  kick(0.5 * h);
  const Vec2 v_old = s.v;
  s.v = rotate(-omega_eff * h, s.v);
  const Vec2 dperp = perp(v_old) - perp(s.v);
  s.x[0] += dperp[0] / wc;
  s.x[1] += dperp[1] / wc;
  s.x3 += h * s.v3;
  kick(0.5 * h);
}

}  // namespace

DriftCheckResult drift_check(const PhasePoint& start, const Potential& pot,
                             const PlasmaParams& params, const std::vector<double>& eps_list,
                             double t_final) {
  validate_params(params);
  if (eps_list.empty()) throw config_error("drift_check: eps list must not be empty");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw config_error("drift_check: eps values must be positive");
  }
  const double wc = params.omega_c();
  const double t_c = 2.0 * 3.1415926535897932384626433832795 / std::abs(wc);
  const int per_period = 64;
  const double r0 = norm(start.v_perp);
  const Vec2 y0 = to_invariants(start, wc).first.y;

  // Averaged-drift field at the initial gyroradius.
  auto drift_at = [&](const Vec2& y) {
    const InvariantCoords inv{y, start.x3, r0, start.v3};
    const PhasePoint p = from_invariants(inv, Gyrophase{0.0}, wc);
    const AveragedField f = averaged_field_components(p, pot, params, 64);
    return Vec2{f.eperp_avg[0] / params.B, f.eperp_avg[1] / params.B};
  };

  DriftCheckResult out;
  for (double eps : eps_list) {
    const double h = eps * t_c / per_period;
    const long n_steps = std::lround(std::ceil(t_final / h));
    const double omega_eff = wc / eps;

    FastState s;
    s.x = start.x_perp;
    s.x3 = start.x3;
    s.v = start.v_perp;
    s.v3 = start.v3;

    Vec2 y_ref = y0;
    std::vector<Vec2> ref_path(static_cast<std::size_t>(n_steps) + 1);
    ref_path[0] = y_ref;
    std::vector<Vec2> window(per_period, start.x_perp);
    Vec2 wsum{0.0, 0.0};
    for (int k = 0; k < per_period; ++k) {
      wsum[0] += window[k][0];
      wsum[1] += window[k][1];
    }

    double max_err = 0.0;
    for (long k = 1; k <= n_steps; ++k) {
      fast_step(s, h, omega_eff, pot, params, wc);
      const int slot = static_cast<int>(k % per_period);
      wsum[0] += s.x[0] - window[slot][0];
      wsum[1] += s.x[1] - window[slot][1];
      window[slot] = s.x;

      // Classic RK4 on the averaged drift, same clock.
      const Vec2 k1 = drift_at(y_ref);
      const Vec2 k2 = drift_at({y_ref[0] + 0.5 * h * k1[0], y_ref[1] + 0.5 * h * k1[1]});
      const Vec2 k3 = drift_at({y_ref[0] + 0.5 * h * k2[0], y_ref[1] + 0.5 * h * k2[1]});
      const Vec2 k4 = drift_at({y_ref[0] + h * k3[0], y_ref[1] + h * k3[1]});
      y_ref[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      y_ref[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
      ref_path[static_cast<std::size_t>(k)] = y_ref;

      if (k >= per_period) {
        // The window mean sits at time t_k - (per_period - 1) h / 2, halfway
        // between two reference samples.
        const Vec2 mean{wsum[0] / per_period, wsum[1] / per_period};
        const std::size_t j = static_cast<std::size_t>(k) - per_period / 2;
        const Vec2& a = ref_path[j];
        const Vec2& b = ref_path[j + 1];
        const Vec2 yr{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        const double err = std::hypot(mean[0] - yr[0], mean[1] - yr[1]);
        max_err = std::max(max_err, err);
      }
    }
    out.eps.push_back(eps);
    out.max_error.push_back(max_err);
  }

  // Least-squares slope of log error against log eps.
  if (out.eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(out.eps.size());
    for (int i = 0; i < m; ++i) {
      const double lx = std::log(out.eps[i]);
      const double ly = std::log(std::max(out.max_error[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return out;
}

}  // namespace gyrokin
