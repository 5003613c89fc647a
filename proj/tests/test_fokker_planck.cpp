// Averaged Fokker-Planck operator: the constant diffusion matrix and its
// one-dimensional kernel, consistency of the invariant flux contractions
// with the full-coordinate gradient, exact mass balance and dissipation
// identity, Maxwellian stationarity, and second-order convergence to the
// continuum rate on a manufactured density.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "density_helpers.hpp"
#include "doctest.h"
#include "gyrokin/fokker_planck.hpp"

using namespace gyrokin;
using gyrokin::testing::ConstrainedGaussian;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

Vec6 l_apply(const Mat6& l, const Vec6& x) {
  Vec6 out{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) out[i] += l[i][j] * x[j];
  return out;
}

std::shared_ptr<ReducedGrid> fp_grid(int n_y, int n_r, int n_v3) {
  auto g = std::make_shared<ReducedGrid>();
  g->n_y1 = n_y;
  g->n_y2 = n_y;
  g->n_x3 = 1;
  g->n_r = n_r;
  g->n_v3 = n_v3;
  g->L = 6.0;
  g->L3 = 1.0;
  g->R_max = 3.5;
  g->V3 = 3.5;
  return g;
}

}  // namespace

TEST_CASE("diffusion matrix: entries, quadratic form, one-dimensional kernel") {
  const Mat6 l = l_matrix();
  // Block form [[2(I3 - e3 e3^T), -E], [E, I3]] with E rows e2, -e1, 0.
  const double expect[6][6] = {{2, 0, 0, 0, -1, 0}, {0, 2, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 0},
                               {0, 1, 0, 1, 0, 0},  {-1, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 1}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(l[i][j] == doctest::Approx(expect[i][j]).epsilon(1e-15));

  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Vec6 xi;
    for (auto& x : xi) x = unit(rng);
    const Vec6 lx = l_apply(l, xi);
    const double got = dot(xi, lx);
    const double m1 = xi[0] * xi[0] + xi[1] * xi[1];
    const double d1 = xi[0] - xi[4], d2 = xi[1] + xi[3];  // xi_x_perp - perp(xi_v_perp)
    const double form = m1 + d1 * d1 + d2 * d2 + xi[5] * xi[5];
    CHECK(got == doctest::Approx(form).epsilon(1e-13));
    CHECK(got >= -1e-13);
  }

  Eigen::Matrix<double, 6, 6> le;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) le(i, j) = l[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(le);
  int null_count = 0;
  for (int i = 0; i < 6; ++i)
    if (std::abs(es.eigenvalues()(i)) <= 1e-12) ++null_count;
  CHECK(null_count == 1);  // only the x3 position direction is annihilated
  const Vec6 e3{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  const Vec6 le3 = l_apply(l, e3);
  CHECK(std::sqrt(dot(le3, le3)) <= 1e-15);
}

TEST_CASE("invariant flux contractions equal the phase-averaged full form") {
  auto grid = fp_grid(8, 8, 8);
  PlasmaParams params;
  params.q = 1.2;
  params.B = 0.9;
  const double wc = params.omega_c();
  ConstrainedGaussian cg;
  cg.y0 = {3.0, 3.0};
  cg.sy = 0.8;
  cg.a = 1.3;
  ReducedDensity h = cg.sample(grid, params);  // stands in for g / M

  const Mat6 l = l_matrix();
  // Invariant gradients (d/dpsi_k) of the five coordinates, as 6-vectors in
  // (omega_c x, v) units, evaluated at gyrophase alpha.
  auto psi_grad = [&](int k, double alpha) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    switch (k) {
      case 0: return Vec6{1.0 / wc, 0.0, 0.0, 0.0, 1.0 / wc, 0.0};
      case 1: return Vec6{0.0, 1.0 / wc, 0.0, -1.0 / wc, 0.0, 0.0};
      case 2: return Vec6{0.0, 0.0, 1.0 / wc, 0.0, 0.0, 0.0};
      case 3: return Vec6{0.0, 0.0, 0.0, ca, sa, 0.0};
      default: return Vec6{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    }
  };

  std::mt19937_64 rng(52);
  std::uniform_int_distribution<std::size_t> pick(0, grid->num_nodes() - 1);
  const int n_alpha = 32;
  for (int t = 0; t < 40; ++t) {
    const std::size_t idx = pick(rng);
    const auto inv_grad = invariant_gradient(h, idx);
    for (int k = 0; k < 5; ++k) {
      double averaged = 0.0;
      for (int a = 0; a < n_alpha; ++a) {
        const double alpha = 2.0 * kPi * a / n_alpha;
        const Vec6 full = full_gradient(h, idx, alpha, params);
        averaged += dot(psi_grad(k, alpha), l_apply(l, full));
      }
      averaged /= n_alpha;
      double expect = 0.0;
      switch (k) {
        case 0: expect = inv_grad[0] / (wc * wc); break;
        case 1: expect = inv_grad[1] / (wc * wc); break;
        case 2: expect = 0.0; break;
        case 3: expect = inv_grad[3]; break;
        default: expect = inv_grad[4]; break;
      }
      CHECK(averaged == doctest::Approx(expect).epsilon(1e-11));
    }
  }
}

TEST_CASE("mass balance and the dissipation identity hold to rounding") {
  auto grid = fp_grid(8, 10, 10);
  PlasmaParams params;
  params.tau = 1.3;
  ConstrainedGaussian cg;
  cg.y0 = {3.0, 3.0};
  cg.sy = 0.9;
  cg.a = 1.5;
  cg.v3_shift = 0.5;
  const ReducedDensity g = cg.sample(grid, params);

  const std::vector<double> rate = apply_qfp_avg(g);
  double rate_mass = 0.0, rate_scale = 0.0, pairing = 0.0;
  for (std::size_t idx = 0; idx < rate.size(); ++idx) {
    int ix3, ir, iv3, iy1, iy2;
    grid->decompose(idx, ix3, ir, iv3, iy1, iy2);
    const double vol = grid->cell_volume(ir);
    rate_mass += rate[idx] * vol;
    rate_scale += std::abs(rate[idx]) * vol;
    pairing += rate[idx] * g.values[idx] /
               maxwellian_rv(grid->r(ir), grid->v3(iv3), params) * vol;
  }
  CHECK(rate_scale > 0.0);
  CHECK(std::abs(rate_mass) <= 1e-12 * rate_scale);

  const double diss = fp_dissipation(g);
  CHECK(diss < 0.0);
  CHECK(pairing == doctest::Approx(diss).epsilon(1e-11));
}

TEST_CASE("global Maxwellian is stationary to rounding") {
  auto grid = fp_grid(6, 10, 10);
  PlasmaParams params;
  const ReducedDensity m = maxwellian_density(grid, params, 2.0);
  const std::vector<double> rate = apply_qfp_avg(m);
  double sup = 0.0, msup = 0.0;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    sup = std::max(sup, std::abs(rate[i]));
    msup = std::max(msup, m.values[i]);
  }
  CHECK(sup <= 1e-12 * msup / params.tau);
  CHECK(std::abs(fp_dissipation(m)) <= 1e-12);
}

TEST_CASE("second-order convergence to the continuum rate") {
  PlasmaParams params;
  params.theta = 1.0;
  params.tau = 0.8;
  ConstrainedGaussian cg;
  cg.y0 = {3.0, 3.0};
  cg.sy = 1.0;
  cg.a = 1.6;
  cg.v3_shift = 0.4;

  // Continuum rate from the closed-form h = g / M, with
  //   h = C exp(-|y - y0|^2 / 2 sy^2) exp(-kappa (r^2 + v3^2) / 2 + mu v3).
  const double kappa = cg.a - params.m / params.theta;
  const double mu = cg.a * cg.v3_shift;
  const double c = params.theta / (params.m * params.tau);
  const double wc = params.omega_c();
  auto continuum = [&](double y1, double y2, double r, double v3, const PlasmaParams& pp) {
    const double m_rv = maxwellian_rv(r, v3, pp);
    const double g_val = cg.reduced_value({{y1, y2}, 0.0, r, v3});
    const double h = g_val / m_rv;
    const double u1 = y1 - cg.y0[0], u2 = y2 - cg.y0[1];
    const double s2 = cg.sy * cg.sy;
    const double h_y1y1 = (u1 * u1 / (s2 * s2) - 1.0 / s2) * h;
    const double h_y2y2 = (u2 * u2 / (s2 * s2) - 1.0 / s2) * h;
    const double h_r = -kappa * r * h;
    const double h_rr = (kappa * kappa * r * r - kappa) * h;
    const double h_v3 = (mu - kappa * v3) * h;
    const double h_v3v3 = ((mu - kappa * v3) * (mu - kappa * v3) - kappa) * h;
    const double m_r = -(pp.m * r / pp.theta) * m_rv;
    const double m_v3 = -(pp.m * v3 / pp.theta) * m_rv;
    return c * ((m_rv / (wc * wc)) * (h_y1y1 + h_y2y2) + m_r * h_r +
                m_rv * (h_rr + h_r / r) + m_v3 * h_v3 + m_rv * h_v3v3);
  };

  auto sup_error = [&](int n_y, int n_r, int n_v3) {
    auto grid = fp_grid(n_y, n_r, n_v3);
    const ReducedDensity g = cg.sample(grid, params);
    const std::vector<double> rate = apply_qfp_avg(g);
    double worst = 0.0, scale = 0.0;
    for (std::size_t idx = 0; idx < rate.size(); ++idx) {
      int ix3, ir, iv3, iy1, iy2;
      grid->decompose(idx, ix3, ir, iv3, iy1, iy2);
      if (ir < 3 || ir >= grid->n_r - 3 || iv3 < 3 || iv3 >= grid->n_v3 - 3) continue;
      // Skip the outermost y rows: their periodic stencil reads wrap around,
      // and the reference density is not periodic.
      if (iy1 == 0 || iy1 == grid->n_y1 - 1 || iy2 == 0 || iy2 == grid->n_y2 - 1) continue;
      const double exact =
          continuum(grid->y1(iy1), grid->y2(iy2), grid->r(ir), grid->v3(iv3), params);
      worst = std::max(worst, std::abs(rate[idx] - exact));
      scale = std::max(scale, std::abs(exact));
    }
    return worst / scale;
  };

  const double coarse = sup_error(8, 12, 12);
  const double fine = sup_error(16, 24, 24);
  CHECK(coarse > 0.0);
  CHECK(coarse / fine >= 3.2);
  CHECK(coarse / fine <= 5.2);
}
