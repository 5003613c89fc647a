#pragma once

#include <vector>

#include "gyrokin/grid.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// Constant 6x6 diffusion matrix of the averaged Fokker-Planck operator, in
// (omega_c x, v) block form [[2(I3 - e3 e3^T), -E], [E, I3]] with E the
// antisymmetric matrix with rows e2, -e1, 0.  Symmetric positive
// semidefinite; the quadratic form is
//   |xi_x_perp|^2 + |xi_x_perp - perp(xi_v_perp)|^2 + xi_v3^2,
// so the kernel is spanned by the x3 position direction alone.
Mat6 l_matrix();

// Averaged Fokker-Planck rate (theta / m tau) div { M L grad (g/M) } with
// all derivatives in (omega_c x, v) units, assembled directly in invariant
// flux contractions:
//   P_y1 = c (M/omega_c^2) d_y1 h,  P_y2 = c (M/omega_c^2) d_y2 h,
//   P_x3 = 0,  P_r = c M d_r h,  P_v3 = c M d_v3 h,   h = g/M, c = theta/(m tau),
// followed by the measure-exact reduced divergence.
std::vector<double> apply_qfp_avg(const ReducedDensity& g);

// Dissipation <apply_qfp_avg(g), g/M> evaluated in its manifestly
// non-positive gradient form; equals the grid inner product exactly by the
// discrete integration-by-parts identity.
double fp_dissipation(const ReducedDensity& g);

}  // namespace gyrokin
