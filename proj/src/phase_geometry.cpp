#include "gyrokin/phase_geometry.hpp"

#include <cmath>

#include "gyrokin/errors.hpp"

namespace gyrokin {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_omega(double omega_c, const char* where) {
  if (omega_c == 0.0) throw domain_error(std::string(where) + ": omega_c must be nonzero");
}
}  // namespace

Vec2 rotate(double alpha, const Vec2& w) {
  double c = std::cos(alpha), s = std::sin(alpha);
  return {c * w[0] - s * w[1], s * w[0] + c * w[1]};
}

double wrap_angle(double alpha) {
  double a = std::fmod(alpha, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

PhasePoint flow(double s, const PhasePoint& p, double omega_c) {
  require_omega(omega_c, "flow");
  PhasePoint out = p;
  out.v_perp = rotate(-omega_c * s, p.v_perp);
  // The guiding center x_perp + perp(v_perp)/omega_c is invariant along the flow.
  out.x_perp = p.x_perp + (1.0 / omega_c) * (perp(p.v_perp) - perp(out.v_perp));
  return out;
}

std::pair<InvariantCoords, Gyrophase> to_invariants(const PhasePoint& p, double omega_c) {
  require_omega(omega_c, "to_invariants");
  InvariantCoords inv;
  inv.y = p.x_perp + (1.0 / omega_c) * perp(p.v_perp);
  inv.x3 = p.x3;
  inv.r = norm(p.v_perp);
  inv.v3 = p.v3;
  Gyrophase ph;
  ph.alpha = (inv.r == 0.0) ? 0.0 : wrap_angle(std::atan2(p.v_perp[1], p.v_perp[0]));
  return {inv, ph};
}

PhasePoint from_invariants(const InvariantCoords& inv, const Gyrophase& phase, double omega_c) {
  require_omega(omega_c, "from_invariants");
  PhasePoint p;
  p.v_perp = {inv.r * std::cos(phase.alpha), inv.r * std::sin(phase.alpha)};
  p.x_perp = inv.y - (1.0 / omega_c) * perp(p.v_perp);
  p.x3 = inv.x3;
  p.v3 = inv.v3;
  return p;
}

Vec6 b_field(int i, const PhasePoint& p, double omega_c) {
  const Vec2& v = p.v_perp;
  switch (i) {
    case 0:
      return {v[0], v[1], 0.0, omega_c * v[1], -omega_c * v[0], 0.0};
    case 1:
      return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    case 2:
      return {0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    case 3:
      return {0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    case 4: {
      require_omega(omega_c, "b_field(4)");
      double r = norm(v);
      if (r == 0.0) throw domain_error("b_field(4): degenerate gyration, r = 0");
      return {-v[1] / (omega_c * r), v[0] / (omega_c * r), 0.0, v[0] / r, v[1] / r, 0.0};
    }
    case 5:
      return {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    default:
      throw domain_error("b_field: index must be in 0..5");
  }
}

Vec6 grad_psi(int i, const PhasePoint& p, double omega_c) {
  const Vec2& v = p.v_perp;
  switch (i) {
    case 0: {
      require_omega(omega_c, "grad_psi(0)");
      double r2 = dot(v, v);
      if (r2 == 0.0) throw domain_error("grad_psi(0): degenerate gyration, r = 0");
      return {0.0, 0.0, 0.0, v[1] / (omega_c * r2), -v[0] / (omega_c * r2), 0.0};
    }
    case 1:
      require_omega(omega_c, "grad_psi(1)");
      return {1.0, 0.0, 0.0, 0.0, 1.0 / omega_c, 0.0};
    case 2:
      require_omega(omega_c, "grad_psi(2)");
      return {0.0, 1.0, 0.0, -1.0 / omega_c, 0.0, 0.0};
    case 3:
      return {0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    case 4: {
      double r = norm(v);
      if (r == 0.0) throw domain_error("grad_psi(4): degenerate gyration, r = 0");
      return {0.0, 0.0, 0.0, v[0] / r, v[1] / r, 0.0};
    }
    case 5:
      return {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    default:
      throw domain_error("grad_psi: index must be in 0..5");
  }
}

}  // namespace gyrokin
