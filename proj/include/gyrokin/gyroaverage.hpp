#pragma once

#include <functional>

#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// Deterministic evaluable map on full phase space.
using ScalarField = std::function<double(const PhasePoint&)>;

struct GyroQuadratureConfig {
  int n_alpha = 32;  // uniform phase nodes, >= 4
};

// Velocity-space quadrature for the nested integral oracles: tensor
// Gauss-Legendre on a cube.  l_box <= 0 selects the automatic box
// half-width 7.5 sqrt(theta/m), beyond which the Maxwellian weight is
// below 1e-12 of its peak.
struct VelocityQuadrature {
  int n_per_axis = 24;
  double l_box = 0.0;
};

double velocity_box_halfwidth(const VelocityQuadrature& vq, const PlasmaParams& params);

// Phase average of u over the gyration orbit through p.  Exact projection:
// averaging twice with the same rule reproduces the average.
double gyroaverage_scalar(const ScalarField& u, const PhasePoint& p, const PlasmaParams& params,
                          const GyroQuadratureConfig& cfg);

// Average of the velocity convolution v -> integral C(v, v') f(x, v') dv'
// over the gyration orbit through p.
double gyroaverage_integral_operator(const std::function<double(const Vec3&, const Vec3&)>& C,
                                     const ScalarField& f, const PhasePoint& p,
                                     const PlasmaParams& params, const GyroQuadratureConfig& cfg,
                                     const VelocityQuadrature& vq);

// Nested-quadrature references for the averaged scattering-tensor moments.
// All of them integrate sigma(|v - v'|) S(v - v') f(x, v') dv' against the
// listed contraction and then phase-average; they serve as the independent
// route when validating the closed-form reduced kernels.
enum class TensorAverageVariant {
  Projection,            // full 3x3 matrix average
  VectorV,               // matrix applied to (v_perp, 0)
  VectorVPrime,          // matrix applied to (v_perp', 0)
  VectorPerpV,           // matrix applied to (perp v_perp, 0)
  VectorPerpVPrime,      // matrix applied to (perp v_perp', 0)
  ScalarVV,              // contraction (v_perp,0) x (v_perp,0)
  ScalarVPerpV,          // contraction (v_perp,0) x (perp v_perp,0)
  ScalarPerpVPerpV,      // contraction (perp v_perp,0) x (perp v_perp,0)
  ScalarVPrimeV,         // contraction (v_perp',0) x (v_perp,0)
  ScalarVPrimePerpV,     // contraction (v_perp',0) x (perp v_perp,0)
  ScalarPerpVPrimePerpV  // contraction (perp v_perp',0) x (perp v_perp,0)
};

struct TensorAverage {
  Mat3 tensor{};
  Vec3 vector{0.0, 0.0, 0.0};
  double scalar = 0.0;
};

TensorAverage gyroaverage_tensor_oracle(const ScalarField& f, TensorAverageVariant variant,
                                        const PhasePoint& p, const PlasmaParams& params,
                                        const CrossSection& cs, const GyroQuadratureConfig& cfg,
                                        const VelocityQuadrature& vq);

// Orthogonal projection onto the plane normal to w; rejects w = 0.
Mat3 scatter_matrix(const Vec3& w);

}  // namespace gyrokin
