#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// One-dimensional difference operator in sparse row form; rows[i] lists
// (column, coefficient) pairs.
struct Stencil1D {
  std::vector<std::vector<std::pair<int, double>>> rows;
};

// Reduced phase-space grid over (y1, y2, x3, r, v3):
//  - y periodic on [0, L)^2, x3 periodic on [0, L3), uniform nodes at i*h;
//  - r cell-centered on (0, R_max], nodes (j + 1/2) dr, the axis r = 0 is
//    excluded;
//  - v3 cell-centered on [-V3, V3], nodes -V3 + (m + 1/2) dv3.
// The phase-space measure carried by each node is 2 pi r dr dv3 dy^2 dx3.
struct ReducedGrid {
  int n_y1 = 8, n_y2 = 8, n_x3 = 1, n_r = 6, n_v3 = 8;
  double L = 1.0, L3 = 1.0, R_max = 3.0, V3 = 3.0;

  double dy1() const { return L / n_y1; }
  double dy2() const { return L / n_y2; }
  double dx3() const { return L3 / n_x3; }
  double dr() const { return R_max / n_r; }
  double dv3() const { return 2.0 * V3 / n_v3; }

  double y1(int a) const { return a * dy1(); }
  double y2(int b) const { return b * dy2(); }
  double x3(int i) const { return i * dx3(); }
  double r(int j) const { return (j + 0.5) * dr(); }
  double v3(int m) const { return -V3 + (m + 0.5) * dv3(); }

  std::size_t num_nodes() const {
    return static_cast<std::size_t>(n_x3) * n_r * n_v3 * n_y1 * n_y2;
  }
  std::size_t slice_size() const { return static_cast<std::size_t>(n_y1) * n_y2; }

  // Flat layout: ((((ix3 * n_r + ir) * n_v3 + iv3) * n_y1 + iy1) * n_y2 + iy2,
  // so each (x3, r, v3) fiber holds a contiguous y-plane.
  std::size_t index(int ix3, int ir, int iv3, int iy1, int iy2) const {
    return ((((static_cast<std::size_t>(ix3) * n_r + ir) * n_v3 + iv3) * n_y1 + iy1) * n_y2 +
            iy2);
  }
  void decompose(std::size_t idx, int& ix3, int& ir, int& iv3, int& iy1, int& iy2) const {
    iy2 = static_cast<int>(idx % n_y2);
    idx /= n_y2;
    iy1 = static_cast<int>(idx % n_y1);
    idx /= n_y1;
    iv3 = static_cast<int>(idx % n_v3);
    idx /= n_v3;
    ir = static_cast<int>(idx % n_r);
    ix3 = static_cast<int>(idx / n_r);
  }

  // Measure weight of the cell around node (ir anywhere on its r-ring).
  double cell_volume(int ir) const {
    return 2.0 * 3.1415926535897932384626433832795 * r(ir) * dr() * dv3() * dy1() * dy2() *
           dx3();
  }
};

void validate_grid(const ReducedGrid& g);

// Density sampled on a ReducedGrid, with the plasma parameters it belongs to.
struct ReducedDensity {
  std::shared_ptr<const ReducedGrid> grid;
  PlasmaParams params;
  std::vector<double> values;
};

ReducedDensity make_density(std::shared_ptr<const ReducedGrid> grid, const PlasmaParams& params);

// Second-order difference stencils per axis:
//   y1, y2, x3: central with periodic wrap;
//   r:  central in the interior, even reflection across the axis at the
//       innermost node, one-sided 3-point at R_max;
//   v3: central in the interior, one-sided 3-point at both ends.
enum class AxisId { Y1 = 0, Y2 = 1, X3 = 2, R = 3, V3 = 4 };

Stencil1D axis_stencil(const ReducedGrid& g, AxisId axis);

// Adjoint of the axis stencil under the discrete measure (weight r on the
// radial axis, uniform elsewhere), so that the divergence below satisfies
// sum_n div(Phi)_n w_n vol_n = -sum_k sum_n Phi_k,n (grad w)_k,n vol_n exactly.
Stencil1D axis_stencil_adjoint(const ReducedGrid& g, AxisId axis);

// Gradient in the invariant coordinates (d/dy1, d/dy2, d/dx3, d/dr, d/dv3).
std::array<double, 5> invariant_gradient(const ReducedDensity& g, std::size_t idx);

// All five derivative fields at once (threaded).
std::array<std::vector<double>, 5> gradient_fields(const ReducedDensity& g);

// Full-coordinate gradient (in omega_c x units) of the constrained density
// at grid node idx and gyrophase alpha:
//   ((d_y1 g, d_y2 g, d_x3 g) / omega_c,
//    (-d_y2 g/omega_c + d_r g cos a, d_y1 g/omega_c + d_r g sin a, d_v3 g)).
Vec6 full_gradient(const ReducedDensity& g, std::size_t idx, double alpha,
                   const PlasmaParams& params);

// Divergence of a flux given through its five invariant contractions
// P_k = Phi . grad_psi_k, k = 1..5:
//   div Phi = sum_k d_psi_k P_k + P_4 / r,
// realized as minus the measure-weighted adjoint of the gradient stencils,
// so the discrete integration-by-parts identity holds exactly (boundary
// rows absorb the one-sided closures).
std::vector<double> reduced_divergence(const std::array<std::vector<double>, 5>& flux,
                                       const ReducedGrid& grid);

// Project a full-coordinate density onto the grid by gyroaveraging at each
// node (the section at gyrophase 0).
ReducedDensity project_initial(const ScalarField& f_full,
                               std::shared_ptr<const ReducedGrid> grid,
                               const PlasmaParams& params, const GyroQuadratureConfig& cfg);

// Interpolation taps for reading a y-plane at a constant offset.
enum class InterpScheme { Bilinear, Spectral };

// Tap set t such that shifted[i] = sum_k t[k].second * field[(i + t[k].first) mod n]
// approximates field(x_i - s).  Bilinear: two nonnegative taps.  Spectral:
// the trigonometric cardinal taps (n even), exact for band-limited data.
// Both kernels are even functions of the displacement.
std::vector<std::pair<int, double>> shift_taps(int n, double h, double shift,
                                               InterpScheme scheme);

// Separable application of x/y taps to an n1 x n2 plane (row-major, stride n2).
void apply_plane_shift(const double* src, double* dst, int n1, int n2,
                       const std::vector<std::pair<int, double>>& taps1,
                       const std::vector<std::pair<int, double>>& taps2,
                       std::vector<double>& scratch);

// Moments and diagnostics functionals over the grid measure.
double mass_functional(const ReducedDensity& g);
double momentum_z_functional(const ReducedDensity& g);
double kinetic_energy_functional(const ReducedDensity& g);
// Mass-weighted integrals of y and of |y|^2 - r^2/omega_c^2 (Larmor circle
// center and power of the origin).
Vec2 larmor_center_functional(const ReducedDensity& g);
double larmor_power_functional(const ReducedDensity& g);
// sum g log g with entries below 1e-300 * max(g) masked out.
double entropy_functional(const ReducedDensity& g);
// Weighted L2 distance to the mass-matched global Maxwellian:
// || g - c M ||_{L2(1/M)} with c = mass(g)/mass(M).
double l2_maxwellian_distance(const ReducedDensity& g);
// Maxwellian sampled on the grid.
ReducedDensity maxwellian_density(std::shared_ptr<const ReducedGrid> grid,
                                  const PlasmaParams& params, double scale = 1.0);

}  // namespace gyrokin
