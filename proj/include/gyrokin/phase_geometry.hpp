#pragma once

#include <utility>

#include "gyrokin/vec.hpp"

namespace gyrokin {

// Full phase-space point (x_perp, x3) in position, (v_perp, v3) in velocity.
struct PhasePoint {
  Vec2 x_perp{0.0, 0.0};
  double x3 = 0.0;
  Vec2 v_perp{0.0, 0.0};
  double v3 = 0.0;
};

// Gyration invariants: guiding center y, axial position x3, gyration
// radius variable r = |v_perp|, axial velocity v3.
struct InvariantCoords {
  Vec2 y{0.0, 0.0};
  double x3 = 0.0;
  double r = 0.0;
  double v3 = 0.0;
};

struct Gyrophase {
  double alpha = 0.0;  // in [0, 2*pi)
};

// Counterclockwise rotation by alpha.
Vec2 rotate(double alpha, const Vec2& w);

// Wrap an angle into [0, 2*pi).
double wrap_angle(double alpha);

// Free-gyration flow for time s: v_perp rotates clockwise at rate omega_c
// about the fixed guiding center, x3 and v3 are frozen.  Periodic with
// period 2*pi/omega_c.  Rejects omega_c == 0.
PhasePoint flow(double s, const PhasePoint& p, double omega_c);

// (x, v) -> (invariants, gyrophase); alpha = 0 when r = 0.  Rejects omega_c == 0.
std::pair<InvariantCoords, Gyrophase> to_invariants(const PhasePoint& p, double omega_c);

// Inverse chart of to_invariants.  Rejects omega_c == 0.
PhasePoint from_invariants(const InvariantCoords& inv, const Gyrophase& phase, double omega_c);

// Frame field b^i, i = 0..5, dual to the invariant gradients:
// b^i . grad_psi(j) = delta_ij.  b^0 generates the gyration.  All are
// divergence-free except i = 4 whose divergence is 1/r.  Rejects r = 0
// for i = 4 (and omega_c = 0 wherever it divides).
Vec6 b_field(int i, const PhasePoint& p, double omega_c);

// Phase-space gradient of psi_i;  psi_0 = -alpha/omega_c (gyration clock),
// psi_1,2 = Larmor center components, psi_3 = x3, psi_4 = r, psi_5 = v3.
// Rejects r = 0 for i in {0, 4}.
Vec6 grad_psi(int i, const PhasePoint& p, double omega_c);

}  // namespace gyrokin
