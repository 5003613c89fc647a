#include "gyrokin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gyrokin/boltzmann.hpp"
#include "gyrokin/errors.hpp"
#include "gyrokin/fokker_planck.hpp"
#include "gyrokin/grid.hpp"
#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/kernels.hpp"
#include "gyrokin/landau.hpp"
#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/physics.hpp"

namespace gyrokin {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

CheckResult make_check(const std::string& name, double measured, double expected,
                       double tolerance) {
  CheckResult c;
  c.name = name;
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tolerance;
  c.pass = std::abs(measured - expected) <= tolerance;
  return c;
}

// Inequality check: passes when measured <= bound.
CheckResult make_bound_check(const std::string& name, double measured, double bound) {
  CheckResult c;
  c.name = name;
  c.measured = measured;
  c.expected = 0.0;
  c.tolerance = bound;
  c.pass = measured <= bound;
  return c;
}

Eigen::Matrix<double, 6, 6> to_eigen(const Mat6& a) {
  Eigen::Matrix<double, 6, 6> m;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = a[i][j];
  }
  return m;
}

// Random kernel point on the interaction support, with the gyration frames
// of both admissible velocity configurations.
struct SupportPoint {
  KernelPoint kp;
  Vec2 n_hat{1.0, 0.0};
  Vec2 n_hat_p{1.0, 0.0};
};

SupportPoint random_support_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.2, 2.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> vpar(-2.0, 2.0);
  std::uniform_real_distribution<double> sign_draw(0.0, 1.0);

  SupportPoint out;
  const double r = radius(rng);
  const double r_p = radius(rng);
  // Chord length strictly inside (|r - r'|, r + r').
  const double lo = std::abs(r - r_p), hi = r + r_p;
  const double l = lo + unit(rng) * (hi - lo);
  const double beta = angle(rng);
  out.kp.r = r;
  out.kp.r_p = r_p;
  out.kp.v3 = vpar(rng);
  out.kp.v3_p = vpar(rng);
  out.kp.z = {l * std::cos(beta), l * std::sin(beta)};

  // Reconstruct a velocity pair compatible with (r, r', z): the unprimed
  // direction makes the angle psi with z given by the cosine rule, with a
  // free mirror sign; the primed direction follows from v' = v - l * iz.
  const double cpsi = std::clamp((r_p * r_p - r * r - l * l) / (2.0 * r * l), -1.0, 1.0);
  const double spsi = std::sqrt(std::max(0.0, 1.0 - cpsi * cpsi));
  const double s = sign_draw(rng) < 0.5 ? spsi : -spsi;
  const Vec2 zhat{out.kp.z[0] / l, out.kp.z[1] / l};
  const Vec2 izhat{-zhat[1], zhat[0]};
  out.n_hat = {-s * zhat[0] - cpsi * izhat[0], -s * zhat[1] - cpsi * izhat[1]};
  const Vec2 vp{r * out.n_hat[0] - l * izhat[0], r * out.n_hat[1] - l * izhat[1]};
  const double vp_norm = std::hypot(vp[0], vp[1]);
  out.n_hat_p = {vp[0] / vp_norm, vp[1] / vp_norm};
  return out;
}

std::shared_ptr<const ReducedGrid> verify_grid() {
  auto g = std::make_shared<ReducedGrid>();
  g->n_y1 = 8;
  g->n_y2 = 8;
  g->n_x3 = 1;
  g->n_r = 6;
  g->n_v3 = 8;
  g->L = 4.0;
  g->L3 = 1.0;
  g->R_max = 2.5;
  g->V3 = 2.5;
  return g;
}

PlasmaParams verify_params() { return PlasmaParams{}; }

// Smooth positive non-equilibrium density: a ring-Maxwellian with a
// y-dependent amplitude and a v3-skewed temperature.
ReducedDensity verify_density(std::shared_ptr<const ReducedGrid> grid,
                              const PlasmaParams& params, double wobble) {
  ReducedDensity g = make_density(grid, params);
  const ReducedGrid& gr = *grid;
  for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    const double r = gr.r(ir), v3 = gr.v3(iv3);
    const double a = 1.0 + wobble * std::sin(2.0 * kPi * gr.y1(iy1) / gr.L) *
                               std::cos(2.0 * kPi * gr.y2(iy2) / gr.L);
    const double skew = 1.0 + 0.25 * wobble * std::tanh(v3);
    g.values[idx] =
        a * skew * std::exp(-0.5 * (r * r + 1.1 * v3 * v3)) * (1.0 + 0.05 * ix3);
  }
  return g;
}

double grid_functional(const ReducedDensity& g, const std::vector<double>& field,
                       double (*psi)(const ReducedGrid&, int, int, int, int)) {
  const ReducedGrid& gr = *g.grid;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    acc += gr.cell_volume(ir) * field[idx] * psi(gr, ir, iv3, iy1, iy2);
  }
  return acc;
}

double rate_scale(const ReducedDensity& g, const std::vector<double>& rate, double psi_sup) {
  const ReducedGrid& gr = *g.grid;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < rate.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
    acc += gr.cell_volume(ir) * std::abs(rate[idx]);
  }
  return std::max(acc * psi_sup, 1e-300);
}

SuiteReport geometry_suite(std::uint64_t seed, bool corrupt_chi) {
  SuiteReport rep;
  rep.suite = "geometry";
  std::mt19937_64 rng(seed ^ 0x67656f6dULL);

  {
    std::uniform_real_distribution<double> radius(0.05, 3.0);
    double worst_sum = 1.0, worst_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double r = radius(rng), r_p = radius(rng);
      const ChiQuadrature q = chi_quadrature(r, r_p, 8, 8);
      double sum = 0.0;
      for (const ChiNode& n : q.nodes) sum += n.weight;
      if (corrupt_chi) sum /= kPi * kPi;  // fault injection, see VerifyOptions
      if (std::abs(sum - 1.0) > worst_dev) {
        worst_dev = std::abs(sum - 1.0);
        worst_sum = sum;
      }
    }
    rep.checks.push_back(make_check("chi-quadrature-normalization", worst_sum, 1.0, 1e-14));
  }

  {
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const double wc = verify_params().omega_c();
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      PhasePoint p{{coord(rng), coord(rng)}, coord(rng), {coord(rng), coord(rng)},
                   coord(rng)};
      const auto [inv, phase] = to_invariants(p, wc);
      const PhasePoint q = from_invariants(inv, phase, wc);
      worst = std::max({worst, std::abs(q.x_perp[0] - p.x_perp[0]),
                        std::abs(q.x_perp[1] - p.x_perp[1]), std::abs(q.x3 - p.x3),
                        std::abs(q.v_perp[0] - p.v_perp[0]),
                        std::abs(q.v_perp[1] - p.v_perp[1]), std::abs(q.v3 - p.v3)});
    }
    rep.checks.push_back(make_check("invariants-round-trip", worst, 0.0, 1e-12));
  }

  {
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> sdist(-5.0, 5.0);
    const double wc = verify_params().omega_c();
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      PhasePoint p{{coord(rng), coord(rng)}, coord(rng), {coord(rng), coord(rng)},
                   coord(rng)};
      const auto inv0 = to_invariants(p, wc).first;
      const auto inv1 = to_invariants(flow(sdist(rng), p, wc), wc).first;
      worst = std::max({worst, std::abs(inv1.y[0] - inv0.y[0]),
                        std::abs(inv1.y[1] - inv0.y[1]), std::abs(inv1.x3 - inv0.x3),
                        std::abs(inv1.r - inv0.r), std::abs(inv1.v3 - inv0.v3)});
    }
    rep.checks.push_back(make_check("flow-preserves-invariants", worst, 0.0, 1e-12));
  }

  {
    // Gyroaveraging fixes functions of the invariants pointwise.
    const PlasmaParams params = verify_params();
    const double wc = params.omega_c();
    const ScalarField u = [wc](const PhasePoint& p) {
      const auto inv = to_invariants(p, wc).first;
      return std::sin(inv.y[0]) * std::cos(0.7 * inv.y[1]) + 0.2 * inv.r * inv.r +
             0.1 * inv.v3 * inv.x3;
    };
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    GyroQuadratureConfig gcfg;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      PhasePoint p{{coord(rng), coord(rng)}, coord(rng), {coord(rng), coord(rng)},
                   coord(rng)};
      worst = std::max(worst, std::abs(gyroaverage_scalar(u, p, params, gcfg) - u(p)));
    }
    rep.checks.push_back(make_check("gyroaverage-fixes-invariants", worst, 0.0, 1e-12));
  }

  return rep;
}

SuiteReport kernels_suite(std::uint64_t seed, bool corrupt_chi) {
  SuiteReport rep;
  rep.suite = "kernels";
  std::mt19937_64 rng(seed ^ 0x6b65726eULL);

  {
    double sum = 0.0;
    const ChiQuadrature q = chi_quadrature(1.0, 1.0, 12, 8);
    for (const ChiNode& n : q.nodes) sum += n.weight;
    if (corrupt_chi) sum /= kPi * kPi;
    rep.checks.push_back(make_check("chi-normalization", sum, 1.0, 1e-14));
    const double val = corrupt_chi ? chi(1.0, 1.0, std::sqrt(2.0)) / (kPi * kPi)
                                   : chi(1.0, 1.0, std::sqrt(2.0));
    rep.checks.push_back(
        make_check("chi-equal-radius-chord", val, 1.0 / (2.0 * kPi * kPi), 1e-14));
  }

  {
    // Triangle identities linking (r, r', |z|) and the angles phi, psi.
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      const SupportPoint sp = random_support_point(rng);
      const double r = sp.kp.r, r_p = sp.kp.r_p;
      const double l = std::hypot(sp.kp.z[0], sp.kp.z[1]);
      const double phi = phi_angle(r, r_p, l);
      const double psi = psi_angle(r, r_p, l);
      worst = std::max(worst,
                       std::abs(l * l - (r * r + r_p * r_p - 2.0 * r * r_p * std::cos(phi))));
      worst = std::max(
          worst, std::abs(r * r - (r_p * r_p + l * l - 2.0 * r_p * l * std::cos(psi - phi))));
      worst = std::max(worst, std::abs(r * std::cos(psi) - r_p * std::cos(psi - phi) + l));
      worst = std::max(worst, std::abs(r * std::sin(psi) - r_p * std::sin(psi - phi)));
    }
    rep.checks.push_back(make_check("angle-identities", worst, 0.0, 1e-12));
  }

  {
    double worst_plus = 0.0, worst_minus = 0.0, worst_eig = 0.0, worst_null = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const SupportPoint sp = random_support_point(rng);
      const Mat6 ap = a_plus(sp.kp, sp.n_hat);
      const Mat6 am = a_minus(sp.kp, sp.n_hat, sp.n_hat_p);
      const auto xi = xi_bare(sp.kp, sp.n_hat);
      const auto xip = xi_bare(swap_kernel_point(sp.kp), sp.n_hat_p);
      double norm_ap = 0.0;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) norm_ap = std::max(norm_ap, std::abs(ap[i][j]));
      }
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          double sp_sum = 0.0, sm_sum = 0.0;
          for (int k = 0; k < 4; ++k) {
            sp_sum += xi[k][i] * xi[k][j];
            sm_sum += xi_signs[k] * xi[k][i] * xip[k][j];
          }
          worst_plus = std::max(worst_plus, std::abs(ap[i][j] - sp_sum) / norm_ap);
          worst_minus = std::max(worst_minus, std::abs(am[i][j] - sm_sum) / norm_ap);
        }
      }
      const Eigen::Matrix<double, 6, 6> m = to_eigen(ap);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(m);
      worst_eig = std::max(worst_eig, -es.eigenvalues().minCoeff() / norm_ap);
      // The two annihilated directions: the x3 axis, and the relative
      // configuration ((z, 0), (-perp z, v3 - v3')).
      const Vec2 z = sp.kp.z;
      const Vec6 n1{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
      const Vec6 n2{z[0], z[1], 0.0, -z[1], z[0], sp.kp.v3 - sp.kp.v3_p};
      for (const Vec6& nv : {n1, n2}) {
        double nn = 0.0;
        for (double c : nv) nn += c * c;
        nn = std::sqrt(nn);
        for (int i = 0; i < 6; ++i) {
          double acc = 0.0;
          for (int j = 0; j < 6; ++j) acc += ap[i][j] * nv[j];
          worst_null = std::max(worst_null, std::abs(acc) / (norm_ap * nn));
        }
      }
    }
    rep.checks.push_back(make_check("a-plus-four-term-assembly", worst_plus, 0.0, 1e-12));
    rep.checks.push_back(make_check("a-minus-cross-assembly", worst_minus, 0.0, 1e-12));
    rep.checks.push_back(make_bound_check("a-plus-negative-eigenvalue", worst_eig, 1e-12));
    rep.checks.push_back(make_check("a-plus-null-vectors", worst_null, 0.0, 1e-12));
  }

  {
    const CrossSection cs =
        make_cross_section(CrossSectionFamily::PowerLaw, 1.3, 0.5, 0.2, 0.0, 12.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const SupportPoint sp = random_support_point(rng);
      const double a = avg_sigma(sp.kp, cs);
      const double b = avg_sigma(swap_kernel_point(sp.kp), cs);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    rep.checks.push_back(make_check("sigma-swap-symmetry", worst, 0.0, 1e-14));
  }

  return rep;
}

SuiteReport boltzmann_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "boltzmann";
  std::mt19937_64 rng(seed ^ 0x626f6c74ULL);
  (void)rng;

  auto grid = verify_grid();
  const PlasmaParams params = verify_params();
  BoltzmannAvgConfig cfg;
  cfg.cross_section = make_cross_section(CrossSectionFamily::Constant, 1.0, 0.0, 0.0, 0.0,
                                         12.0);
  cfg.n_phi = 4;
  cfg.n_alpha = 4;

  const ReducedDensity maxw = maxwellian_density(grid, params, 1.0);
  {
    const auto rate = apply_qb_avg(maxw, cfg);
    const auto loss = qb_loss(maxw, cfg);
    double sup_rate = 0.0, sup_loss = 0.0;
    for (double v : rate) sup_rate = std::max(sup_rate, std::abs(v));
    for (double v : loss) sup_loss = std::max(sup_loss, std::abs(v));
    rep.checks.push_back(make_check("maxwellian-stationarity", sup_rate / sup_loss, 0.0,
                                    1e-10));
  }

  const ReducedDensity g = verify_density(grid, params, 0.4);
  const auto rate = apply_qb_avg(g, cfg);
  {
    const double mass_rate = grid_functional(
        g, rate, [](const ReducedGrid&, int, int, int, int) { return 1.0; });
    rep.checks.push_back(
        make_check("mass-conservation", mass_rate / rate_scale(g, rate, 1.0), 0.0, 1e-12));
  }
  {
    const auto gain = qb_gain(g, cfg);
    double min_gain = 0.0, max_gain = 0.0;
    for (double v : gain) {
      min_gain = std::min(min_gain, v);
      max_gain = std::max(max_gain, v);
    }
    rep.checks.push_back(
        make_bound_check("gain-positivity", -min_gain / std::max(max_gain, 1e-300), 1e-15));
  }
  {
    const double prod = qb_entropy_production(g, cfg);
    rep.checks.push_back(
        make_bound_check("entropy-production-sign", prod / std::max(std::abs(prod), 1e-300),
                         1e-15));

    // <apply(g), g/M> must reproduce the quadratic form.
    const ReducedGrid& gr = *grid;
    double inner = 0.0;
    for (std::size_t idx = 0; idx < rate.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
      const double m = maxwellian_rv(gr.r(ir), gr.v3(iv3), params);
      inner += gr.cell_volume(ir) * rate[idx] * g.values[idx] / m;
    }
    rep.checks.push_back(make_check("dissipation-identity",
                                    (inner - prod) / std::max(std::abs(prod), 1e-300), 0.0,
                                    1e-2));
  }
  {
    // The weighted weak form <apply(g), phi/M> is symmetric under g <-> phi.
    const ReducedDensity phi = verify_density(grid, params, -0.3);
    const auto rate_phi = apply_qb_avg(phi, cfg);
    const ReducedGrid& gr = *grid;
    double s_gp = 0.0, s_pg = 0.0;
    for (std::size_t idx = 0; idx < rate.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
      const double m = maxwellian_rv(gr.r(ir), gr.v3(iv3), params);
      s_gp += gr.cell_volume(ir) * rate[idx] * phi.values[idx] / m;
      s_pg += gr.cell_volume(ir) * rate_phi[idx] * g.values[idx] / m;
    }
    rep.checks.push_back(make_check("weak-form-symmetry",
                                    (s_gp - s_pg) / std::max(std::abs(s_gp), 1e-300), 0.0,
                                    1e-10));
  }

  return rep;
}

SuiteReport fp_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "fp";
  std::mt19937_64 rng(seed ^ 0x666f6b6bULL);

  {
    const Mat6 lm = l_matrix();
    Eigen::Matrix<double, 6, 6> m = to_eigen(lm);
    Eigen::Matrix<double, 6, 6> sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(sym);
    rep.checks.push_back(
        make_bound_check("l-matrix-negative-eigenvalue", -es.eigenvalues().minCoeff(),
                         1e-14));
    int null_dim = 0;
    for (int i = 0; i < 6; ++i) {
      if (std::abs(es.eigenvalues()(i)) < 1e-12) ++null_dim;
    }
    rep.checks.push_back(make_check("l-matrix-kernel-dimension", null_dim, 1.0, 0.0));

    std::uniform_real_distribution<double> comp(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      Vec6 xi;
      for (double& c : xi) c = comp(rng);
      double quad = 0.0;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) quad += lm[i][j] * xi[i] * xi[j];
      }
      const double xp1 = xi[0], xp2 = xi[1];
      const double pv1 = xi[4], pv2 = -xi[3];  // perp of the velocity part
      const double direct = xp1 * xp1 + xp2 * xp2 + (xp1 - pv1) * (xp1 - pv1) +
                            (xp2 - pv2) * (xp2 - pv2) + xi[5] * xi[5];
      worst = std::max(worst, std::abs(quad - direct));
    }
    rep.checks.push_back(make_check("l-matrix-quadratic-form", worst, 0.0, 1e-12));
  }

  auto grid = verify_grid();
  const PlasmaParams params = verify_params();
  const ReducedDensity maxw = maxwellian_density(grid, params, 1.0);
  const ReducedDensity g = verify_density(grid, params, 0.4);
  const auto rate = apply_qfp_avg(g);
  {
    const auto rate_m = apply_qfp_avg(maxw);
    double sup_m = 0.0, sup_g = 0.0;
    for (double v : rate_m) sup_m = std::max(sup_m, std::abs(v));
    for (double v : rate) sup_g = std::max(sup_g, std::abs(v));
    rep.checks.push_back(
        make_check("maxwellian-stationarity", sup_m / sup_g, 0.0, 1e-10));
  }
  {
    const double diss = fp_dissipation(g);
    const ReducedGrid& gr = *grid;
    double inner = 0.0;
    for (std::size_t idx = 0; idx < rate.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
      const double m = maxwellian_rv(gr.r(ir), gr.v3(iv3), params);
      inner += gr.cell_volume(ir) * rate[idx] * g.values[idx] / m;
    }
    rep.checks.push_back(make_check(
        "dissipation-identity", (inner - diss) / std::max(std::abs(diss), 1e-300), 0.0,
        1e-10));
    rep.checks.push_back(make_bound_check(
        "dissipation-sign", diss / std::max(std::abs(diss), 1e-300), 1e-15));
  }

  return rep;
}

SuiteReport landau_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "landau";
  std::mt19937_64 rng(seed ^ 0x6c616e64ULL);
  (void)rng;

  auto grid = verify_grid();
  const PlasmaParams params = verify_params();
  FplConfig cfg;
  cfg.cross_section = make_cross_section(CrossSectionFamily::Constant, 1.0, 0.0, 0.0, 0.0,
                                         12.0);
  cfg.n_phi = 4;
  cfg.n_alpha = 4;

  const ReducedDensity g = verify_density(grid, params, 0.4);
  const auto rate = apply_qfpl_avg(g, cfg);
  {
    const double mass_rate = grid_functional(
        g, rate, [](const ReducedGrid&, int, int, int, int) { return 1.0; });
    const double pz_rate = grid_functional(
        g, rate, [](const ReducedGrid& gr, int, int iv3, int, int) { return gr.v3(iv3); });
    const double e_rate =
        grid_functional(g, rate, [](const ReducedGrid& gr, int ir, int iv3, int, int) {
          const double r = gr.r(ir), v3 = gr.v3(iv3);
          return 0.5 * (r * r + v3 * v3);
        });
    const double vsup = std::max(grid->V3, 1.0);
    const double esup = 0.5 * (grid->R_max * grid->R_max + grid->V3 * grid->V3);
    const double worst = std::max({std::abs(mass_rate) / rate_scale(g, rate, 1.0),
                                   std::abs(pz_rate) / rate_scale(g, rate, vsup),
                                   std::abs(e_rate) / rate_scale(g, rate, esup)});
    rep.checks.push_back(make_check("collision-invariants", worst, 0.0, 1e-6));
  }
  {
    const double prod = fpl_entropy_production(g, cfg);
    rep.checks.push_back(make_bound_check(
        "entropy-production-sign", prod / std::max(std::abs(prod), 1e-300), 1e-15));
  }
  {
    const double wc = params.omega_c();
    const InvariantField phi = [wc](const InvariantCoords& c) {
      return std::cos(2.0 * kPi * c.y[0] / 4.0) + 0.3 * c.r * c.r * c.v3 +
             0.2 * std::sin(2.0 * kPi * c.y[1] / 4.0) * c.v3 + 0.1 * wc * c.x3;
    };
    const double weak = fpl_weak_form(g, phi, cfg);
    const double defect = fpl_weak_vs_strong_check(g, phi, cfg);
    rep.checks.push_back(make_check(
        "weak-equals-strong", defect / std::max(std::abs(weak), 1e-300), 0.0, 1e-8));
  }
  {
    const ReducedDensity maxw = maxwellian_density(grid, params, 1.0);
    const auto rate_m = apply_qfpl_avg(maxw, cfg);
    double sup_m = 0.0, sup_g = 0.0;
    for (double v : rate_m) sup_m = std::max(sup_m, std::abs(v));
    for (double v : rate) sup_g = std::max(sup_g, std::abs(v));
    rep.checks.push_back(
        make_bound_check("maxwellian-stationarity", sup_m / sup_g, 0.1));
  }

  return rep;
}

}  // namespace

bool SuiteReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<SuiteReport> run_verification(const VerifyOptions& opt) {
  const std::string& s = opt.suite;
  const bool all = s == "all";
  if (!all && s != "geometry" && s != "kernels" && s != "boltzmann" && s != "fp" &&
      s != "landau") {
    throw config_error(
        "verify.suite: must be one of geometry, kernels, boltzmann, fp, landau, all");
  }
  std::vector<SuiteReport> out;
  if (all || s == "geometry") out.push_back(geometry_suite(opt.seed, opt.corrupt_chi));
  if (all || s == "kernels") out.push_back(kernels_suite(opt.seed, opt.corrupt_chi));
  if (all || s == "boltzmann") out.push_back(boltzmann_suite(opt.seed));
  if (all || s == "fp") out.push_back(fp_suite(opt.seed));
  if (all || s == "landau") out.push_back(landau_suite(opt.seed));
  return out;
}

nlohmann::json verification_report(const VerifyOptions& opt,
                                   const std::vector<SuiteReport>& reports) {
  nlohmann::json j;
  j["seed"] = opt.seed;
  j["suite"] = opt.suite;
  bool pass = true;
  j["suites"] = nlohmann::json::array();
  for (const SuiteReport& rep : reports) {
    nlohmann::json js;
    js["suite"] = rep.suite;
    js["pass"] = rep.all_pass();
    js["checks"] = nlohmann::json::array();
    for (const CheckResult& c : rep.checks) {
      js["checks"].push_back({{"name", c.name},
                              {"measured", c.measured},
                              {"expected", c.expected},
                              {"tolerance", c.tolerance},
                              {"pass", c.pass}});
    }
    pass = pass && rep.all_pass();
    j["suites"].push_back(js);
  }
  j["pass"] = pass;
  return j;
}

}  // namespace gyrokin
