#pragma once

#include <vector>

#include "gyrokin/grid.hpp"
#include "gyrokin/kernels.hpp"
#include "gyrokin/physics.hpp"

namespace gyrokin {

// Quadrature and interpolation profile for the averaged relaxation operator.
struct BoltzmannAvgConfig {
  CrossSection cross_section;
  int n_phi = 6;                                 // chi angle nodes, >= 2
  int n_alpha = 8;                               // offset direction nodes, even >= 4
  InterpScheme interp = InterpScheme::Bilinear;  // off-grid guiding-center reads
};

// Averaged relaxation rate (gain - loss)/tau on the reduced grid.  The gain
// at a node (y, x3, r, v3) sums over source cells (r', v3') and offset nodes
// z: weight * sigma(s) * M(r, v3) * g(y - z/omega_c, x3, r', v3'); the loss
// is g times the same quadrature applied to M(r', v3').  Output at slab x3
// depends only on g at the same x3.
std::vector<double> apply_qb_avg(const ReducedDensity& g, const BoltzmannAvgConfig& cfg);

// The two halves of apply_qb_avg, both including the 1/tau factor and both
// non-negative for non-negative g.
std::vector<double> qb_gain(const ReducedDensity& g, const BoltzmannAvgConfig& cfg);
std::vector<double> qb_loss(const ReducedDensity& g, const BoltzmannAvgConfig& cfg);

// Loss multiplier per (r, v3) ring (layout ir * n_v3 + iv3), 1/tau included:
// loss = coefficient * g pointwise.
std::vector<double> qb_loss_coefficient(const ReducedGrid& grid, const PlasmaParams& params,
                                        const BoltzmannAvgConfig& cfg);

// Dissipation of the relaxation operator: the non-positive quadratic form
// -(1/2 tau) sum over node pairs of weight * sigma * M M' (g/M - g'/M')^2,
// equal to the grid inner product <apply_qb_avg(g), g/M> up to the
// interpolation asymmetry between reading g and reading g/M off-grid.
double qb_entropy_production(const ReducedDensity& g, const BoltzmannAvgConfig& cfg);

}  // namespace gyrokin
