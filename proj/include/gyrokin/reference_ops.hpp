#pragma once

#include <functional>

#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// Analytic density with velocity derivatives, used by the full-coordinate
// reference collision evaluators.
struct SmoothDensity {
  std::function<double(const Vec3& x, const Vec3& v)> value;
  std::function<Vec3(const Vec3& x, const Vec3& v)> vgrad;
  std::function<Mat3(const Vec3& x, const Vec3& v)> vhess;
};

// Velocity integrals near the diagonal v' = v: the integrand has a kink at
// w = v' - v = 0, so the cube [-l, l]^3 centered at w = 0 is split into
// octants with a corner at the kink and Gauss-Legendre is applied per octant.
double octant_box_integral(const std::function<double(const Vec3&)>& fn, double l,
                           int n_per_axis);

// Pointwise relaxation collision rate
//   (1/tau) { M(v) int sigma f(x,v') dv' - f(x,v) int sigma M(v') dv' }.
double full_coordinate_relaxation_rate(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                       const PlasmaParams& params, const CrossSection& cs,
                                       const VelocityQuadrature& vq);

// Phase average of the relaxation rate over the gyration orbit through p.
double gyroaveraged_relaxation_rate(const SmoothDensity& f, const PhasePoint& p,
                                    const PlasmaParams& params, const CrossSection& cs,
                                    const GyroQuadratureConfig& cfg, const VelocityQuadrature& vq);

// Pointwise Landau collision rate
//   div_v int sigma(|w|) S(w) { f(x,v') grad_v f(x,v) - f(x,v) grad_v' f(x,v') } dv',
// with the divergence expanded analytically:
//   div_w (sigma S) = -2 sigma w / |w|^2,  S grad sigma = 0.
double full_coordinate_landau_rate(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                   const PlasmaParams& params, const CrossSection& cs,
                                   const VelocityQuadrature& vq);

// Same rate with the outer divergence taken by central differences of the
// flux integral; slower, kept as a cross-check on the analytic expansion.
double full_coordinate_landau_rate_fd(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                      const PlasmaParams& params, const CrossSection& cs,
                                      const VelocityQuadrature& vq, double h);

// Phase average of the Landau rate over the gyration orbit through p.
double gyroaveraged_landau_rate(const SmoothDensity& f, const PhasePoint& p,
                                const PlasmaParams& params, const CrossSection& cs,
                                const GyroQuadratureConfig& cfg, const VelocityQuadrature& vq);

}  // namespace gyrokin
