// Parameter validation, Maxwellian normalization, cross-section families
// and their verified bounds, potential fields, and the gyroaveraged field
// components against closed forms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "gyrokin/errors.hpp"
#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/physics.hpp"

using namespace gyrokin;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

TEST_CASE("parameter validation rejects non-physical input") {
  PlasmaParams p;
  CHECK_NOTHROW(validate_params(p));
  p.m = 0.0;
  CHECK_THROWS_AS(validate_params(p), config_error);
  p = PlasmaParams{};
  p.theta = -1.0;
  CHECK_THROWS_AS(validate_params(p), config_error);
  p = PlasmaParams{};
  p.q = 0.0;
  CHECK_THROWS_AS(validate_params(p), config_error);
  p = PlasmaParams{};
  p.tau = 0.0;
  CHECK_THROWS_AS(validate_params(p), config_error);
}

TEST_CASE("omega_c sign and magnitude") {
  PlasmaParams p;
  p.q = 2.0;
  p.B = 3.0;
  p.m = 0.5;
  CHECK(p.omega_c() == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("maxwellian peak value and normalization") {
  PlasmaParams p;
  CHECK(maxwellian({0.0, 0.0, 0.0}, p) ==
        doctest::Approx(std::pow(2.0 * kPi, -1.5)).epsilon(1e-14));

  // Midpoint quadrature of 2 pi r M(r, v3) dr dv3 over a generous box.
  p.theta = 0.7;
  p.m = 1.3;
  const int n = 4000;
  const double rmax = 6.0, vmax = 6.0;
  const double dr = rmax / n, dv = 2.0 * vmax / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < n; ++j) {
      const double v3 = -vmax + (j + 0.5) * dv;
      total += 2.0 * kPi * r * maxwellian_rv(r, v3, p) * dr * dv;
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("maxwellian_rv matches the full-velocity form") {
  PlasmaParams p;
  p.theta = 1.7;
  p.m = 0.6;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int t = 0; t < 50; ++t) {
    const Vec3 v{u(rng), u(rng), u(rng)};
    const double r = std::hypot(v[0], v[1]);
    CHECK(maxwellian(v, p) == doctest::Approx(maxwellian_rv(r, v[2], p)).epsilon(1e-14));
  }
}

TEST_CASE("cross sections evaluate their families and verified bounds") {
  const CrossSection c0 =
      make_cross_section(CrossSectionFamily::Constant, 2.5, 0.0, 0.0, 0.0, 10.0);
  CHECK(sigma_eval(0.3, c0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(c0.s_lower == doctest::Approx(2.5));
  CHECK(c0.s_upper == doctest::Approx(2.5));

  const CrossSection cp =
      make_cross_section(CrossSectionFamily::PowerLaw, 1.2, -0.8, 0.3, 0.1, 8.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 8.0);
  for (int t = 0; t < 200; ++t) {
    const double s = u(rng);
    const double expect = 1.2 * std::pow(s * s + 0.09, -0.4);
    const double got = sigma_eval(s, cp);
    CHECK(got == doctest::Approx(expect).epsilon(1e-13));
    CHECK(got >= cp.s_lower * (1.0 - 1e-12));
    CHECK(got <= cp.s_upper * (1.0 + 1e-12));
  }

  CHECK_THROWS_AS(make_cross_section(CrossSectionFamily::Constant, -1.0, 0, 0, 0, 1),
                  config_error);
  CHECK_THROWS_AS(make_cross_section(CrossSectionFamily::PowerLaw, 1.0, 1.0, -0.1, 0, 1),
                  config_error);
  CHECK_THROWS_AS(make_cross_section(CrossSectionFamily::Constant, 1.0, 0, 0, 2.0, 1.0),
                  config_error);
}

TEST_CASE("electric field is minus the potential gradient") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double h = 1e-6;

  Potential pots[3];
  pots[0].family = PotentialFamily::UniformGradient;
  pots[0].gradient = {0.4, -0.7, 0.9};
  pots[1].family = PotentialFamily::Harmonic;
  pots[1].curvature = {1.1, 0.6, -0.4};
  pots[2].family = PotentialFamily::Separable;
  pots[2].amp = 0.8;
  pots[2].k = {1.3, -0.5};
  pots[2].shift = 0.2;
  pots[2].a3 = 0.7;
  pots[2].amp3 = 0.3;
  pots[2].k3 = 2.0;
  pots[2].shift3 = -0.4;

  for (const Potential& pot : pots) {
    for (int t = 0; t < 30; ++t) {
      const Vec3 x{u(rng), u(rng), u(rng)};
      const Vec3 e = efield(x, pot);
      for (int d = 0; d < 3; ++d) {
        Vec3 xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        const double fd = -(potential_value(xp, pot) - potential_value(xm, pot)) / (2.0 * h);
        CHECK(e[d] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("averaged fields: uniform gradient passes through unchanged") {
  PlasmaParams params;
  Potential pot;
  pot.family = PotentialFamily::UniformGradient;
  pot.gradient = {0.5, -0.3, 0.8};
  const PhasePoint p{{0.3, -0.2}, 0.1, {0.9, 0.4}, -0.5};
  const AveragedField f = averaged_field_components(p, pot, params, 16);
  // E = -gradient; perp E = (E2, -E1).
  CHECK(f.eperp_avg[0] == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(f.eperp_avg[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(f.e3_avg == doctest::Approx(-0.8).epsilon(1e-13));
}

TEST_CASE("averaged fields: harmonic potential sees the Larmor center") {
  PlasmaParams params;
  params.B = 2.0;
  const double wc = params.omega_c();
  Potential pot;
  pot.family = PotentialFamily::Harmonic;
  pot.curvature = {1.0, 1.0, 0.6};
  const PhasePoint p{{0.4, 0.7}, 0.25, {1.1, -0.3}, 0.0};
  const Vec2 y = to_invariants(p, wc).first.y;
  const AveragedField f = averaged_field_components(p, pot, params, 64);
  // E = -(x1, x2, c3 x3); perp E = (E2, -E1) averages to (-y2, y1).
  CHECK(f.eperp_avg[0] == doctest::Approx(-y[1]).epsilon(1e-12));
  CHECK(f.eperp_avg[1] == doctest::Approx(y[0]).epsilon(1e-12));
  CHECK(f.e3_avg == doctest::Approx(-0.6 * 0.25).epsilon(1e-12));
}

TEST_CASE("averaged fields: plane wave picks up the Bessel attenuation") {
  PlasmaParams params;
  const double wc = params.omega_c();
  Potential pot;
  pot.family = PotentialFamily::Separable;
  pot.amp = 0.9;
  pot.k = {1.4, 0.6};
  pot.shift = 0.3;
  const PhasePoint p{{0.2, -0.5}, 0.0, {1.2, 0.7}, 0.4};
  const auto inv = to_invariants(p, wc).first;
  const double knorm = std::hypot(pot.k[0], pot.k[1]);
  const double rho = inv.r / std::abs(wc);
  const double carrier = std::sin(pot.k[0] * inv.y[0] + pot.k[1] * inv.y[1] + pot.shift);
  const double atten = std::cyl_bessel_j(0, knorm * rho);
  // E_perp = amp k sin(k.x + shift); averaging the sine over the Larmor
  // circle multiplies the carrier at the center by J0(|k| rho).
  const Vec2 e_expect{pot.amp * pot.k[0] * carrier * atten,
                      pot.amp * pot.k[1] * carrier * atten};
  const AveragedField f = averaged_field_components(p, pot, params, 128);
  CHECK(f.eperp_avg[0] == doctest::Approx(e_expect[1]).epsilon(1e-10));
  CHECK(f.eperp_avg[1] == doctest::Approx(-e_expect[0]).epsilon(1e-10));
  CHECK(f.e3_avg == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("averaged fields reject too few nodes") {
  PlasmaParams params;
  Potential pot;
  const PhasePoint p{{0.0, 0.0}, 0.0, {1.0, 0.0}, 0.0};
  CHECK_THROWS_AS(averaged_field_components(p, pot, params, 2), domain_error);
}
