#pragma once

#include <functional>
#include <vector>

#include "gyrokin/grid.hpp"
#include "gyrokin/kernels.hpp"
#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/physics.hpp"

namespace gyrokin {

// Quadrature and interpolation profile for the averaged Fokker-Planck-Landau
// operator.  positivity_floor only guards the log ratio inside the entropy
// production diagnostic; it never enters the dynamics.
struct FplConfig {
  CrossSection cross_section;
  int n_phi = 4;
  int n_alpha = 4;
  InterpScheme interp = InterpScheme::Bilinear;
  double positivity_floor = 1e-30;
};

// Collision rate of the averaged Fokker-Planck-Landau operator acting on the
// reduced density g.  The rate is assembled in divergence form: for each
// invariant direction, a flux field is accumulated from gain contributions
// (shifted source density times projected tensor-kernel contractions) and loss
// contributions (local density times swapped contractions), and the exact
// discrete adjoint divergence of the five flux fields is returned.  Mass is
// therefore conserved to rounding, and momentum, kinetic energy, and the
// Larmor-center functionals are conserved through the antisymmetry of the
// kernel fields under exchange of the two collision points.
std::vector<double> apply_qfpl_avg(const ReducedDensity& g, const FplConfig& cfg);

// Bilinear collision rate Q(f, h) symmetrized in its two arguments, recovered
// from the quadratic apply by the exact polarization identity
//   Q(f, h) = (Q(f + h) - Q(f) - Q(h)) / 2.
// The apply is exactly bilinear term by term, so no extra truncation error is
// introduced.  Both densities must share one grid and one parameter set.
std::vector<double> apply_qfpl_pair(const ReducedDensity& f, const ReducedDensity& h,
                                    const FplConfig& cfg);

// Scalar test field on the invariant coordinates.
using InvariantField = std::function<double(const InvariantCoords&)>;

// Weak form of the averaged operator against the test field phi: the
// symmetrized double integral of the kernel brackets of g and phi over all
// collision pairs.  phi is sampled on the grid and differentiated with the
// same stencils as the density, so the value matches the grid inner product
// of apply_qfpl_avg(g) with phi up to quadrature of the off-grid point.
double fpl_weak_form(const ReducedDensity& g, const InvariantField& phi, const FplConfig& cfg);

// |<apply_qfpl_avg(g), phi>_grid - fpl_weak_form(g, phi)|.
double fpl_weak_vs_strong_check(const ReducedDensity& g, const InvariantField& phi,
                                const FplConfig& cfg);

// Entropy production of the averaged operator: the weak form evaluated at
// phi = ln g, arranged as a manifestly non-positive sum of squared kernel
// brackets weighted by g g'.  The gradient of ln g is formed as the stencil
// gradient of g divided pointwise by max(g, positivity_floor).
double fpl_entropy_production(const ReducedDensity& g, const FplConfig& cfg);

// The six functionals conserved by the averaged operator, evaluated in one
// pass: total mass, parallel momentum, kinetic energy, the two Larmor-center
// coordinates, and the Larmor power |y|^2 - r^2/omega_c^2.
struct FplInvariants {
  double mass = 0.0;
  double momentum_z = 0.0;
  double energy = 0.0;
  double center_y1 = 0.0;
  double center_y2 = 0.0;
  double larmor_power = 0.0;
};

FplInvariants fpl_conserved_functionals(const ReducedDensity& g);

}  // namespace gyrokin
