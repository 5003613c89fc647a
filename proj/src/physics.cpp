#include "gyrokin/physics.hpp"

#include <cmath>
#include <string>

#include "gyrokin/errors.hpp"

namespace gyrokin {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void validate_params(const PlasmaParams& p) {
  if (p.q == 0.0) throw config_error("params.q: charge must be nonzero");
  if (!(p.m > 0.0)) throw config_error("params.m: mass must be positive");
  if (!(p.B > 0.0)) throw config_error("params.B: field strength must be positive");
  if (!(p.theta > 0.0)) throw config_error("params.theta: temperature must be positive");
  if (!(p.tau > 0.0)) throw config_error("params.tau: relaxation time must be positive");
}

double maxwellian(const Vec3& v, const PlasmaParams& p) {
  double a = p.m / (kTwoPi * p.theta);
  return a * std::sqrt(a) * std::exp(-0.5 * p.m * dot(v, v) / p.theta);
}

double maxwellian_rv(double r, double v3, const PlasmaParams& p) {
  double a = p.m / (kTwoPi * p.theta);
  return a * std::sqrt(a) * std::exp(-0.5 * p.m * (r * r + v3 * v3) / p.theta);
}

CrossSection make_cross_section(CrossSectionFamily family, double sigma0, double gamma,
                                double delta, double s_min, double s_max) {
  if (!(sigma0 > 0.0)) throw config_error("cross_section.sigma0: must be positive");
  if (delta < 0.0) throw config_error("cross_section.delta: must be nonnegative");
  if (s_min < 0.0 || !(s_max > s_min))
    throw config_error("cross_section.s_min/s_max: need 0 <= s_min < s_max");
  CrossSection cs;
  cs.family = family;
  cs.sigma0 = sigma0;
  cs.gamma = gamma;
  cs.delta = delta;
  cs.s_min = s_min;
  cs.s_max = s_max;
  if (family == CrossSectionFamily::Constant) {
    cs.s_lower = cs.s_upper = sigma0;
  } else {
    // sigma is monotone in s for either sign of gamma: bounds at the endpoints.
    double a = sigma_eval(s_min, cs);
    double b = sigma_eval(s_max, cs);
    cs.s_lower = std::min(a, b);
    cs.s_upper = std::max(a, b);
  }
  if (!(cs.s_lower > 0.0))
    throw config_error("cross_section: lower bound of sigma vanishes on the declared range");
  if (!std::isfinite(cs.s_upper))
    throw config_error("cross_section: upper bound of sigma diverges on the declared range");
  return cs;
}

double sigma_eval(double s, const CrossSection& cs) {
  if (s < 0.0) throw domain_error("sigma_eval: relative speed must be nonnegative");
  if (cs.family == CrossSectionFamily::Constant) return cs.sigma0;
  return cs.sigma0 * std::pow(s * s + cs.delta * cs.delta, 0.5 * cs.gamma);
}

double potential_value(const Vec3& x, const Potential& pot) {
  switch (pot.family) {
    case PotentialFamily::None:
      return 0.0;
    case PotentialFamily::UniformGradient:
      return dot(pot.gradient, x);
    case PotentialFamily::Harmonic:
      return 0.5 * (pot.curvature[0] * x[0] * x[0] + pot.curvature[1] * x[1] * x[1] +
                    pot.curvature[2] * x[2] * x[2]);
    case PotentialFamily::Separable:
      return pot.amp * std::cos(pot.k[0] * x[0] + pot.k[1] * x[1] + pot.shift) +
             0.5 * pot.a3 * x[2] * x[2] + pot.amp3 * std::cos(pot.k3 * x[2] + pot.shift3);
  }
  return 0.0;
}

Vec3 efield(const Vec3& x, const Potential& pot) {
  switch (pot.family) {
    case PotentialFamily::None:
      return {0.0, 0.0, 0.0};
    case PotentialFamily::UniformGradient:
      return {-pot.gradient[0], -pot.gradient[1], -pot.gradient[2]};
    case PotentialFamily::Harmonic:
      return {-pot.curvature[0] * x[0], -pot.curvature[1] * x[1], -pot.curvature[2] * x[2]};
    case PotentialFamily::Separable: {
      double s = std::sin(pot.k[0] * x[0] + pot.k[1] * x[1] + pot.shift);
      return {pot.amp * pot.k[0] * s, pot.amp * pot.k[1] * s,
              -pot.a3 * x[2] + pot.amp3 * pot.k3 * std::sin(pot.k3 * x[2] + pot.shift3)};
    }
  }
  return {0.0, 0.0, 0.0};
}

AveragedField averaged_field_components(const PhasePoint& p, const Potential& pot,
                                        const PlasmaParams& params, int n_nodes) {
  if (n_nodes < 4) throw domain_error("averaged_field_components: n_nodes must be >= 4");
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  AveragedField out;
  for (int j = 0; j < n_nodes; ++j) {
    double alpha = kTwoPi * static_cast<double>(j) / static_cast<double>(n_nodes);
    Vec2 vperp{inv.r * std::cos(alpha), inv.r * std::sin(alpha)};
    Vec2 xperp = inv.y - (1.0 / omega_c) * perp(vperp);
    Vec3 e = efield({xperp[0], xperp[1], inv.x3}, pot);
    out.eperp_avg[0] += e[1];
    out.eperp_avg[1] += -e[0];
    out.e3_avg += e[2];
  }
  double inv_n = 1.0 / static_cast<double>(n_nodes);
  out.eperp_avg[0] *= inv_n;
  out.eperp_avg[1] *= inv_n;
  out.e3_avg *= inv_n;
  return out;
}

}  // namespace gyrokin
