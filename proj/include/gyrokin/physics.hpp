#pragma once

#include "gyrokin/phase_geometry.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// Single-species plasma data; omega_c = q B / m.
struct PlasmaParams {
  double q = 1.0;      // charge, nonzero
  double m = 1.0;      // mass, positive
  double B = 1.0;      // magnetic field strength, positive
  double theta = 1.0;  // temperature, positive
  double tau = 1.0;    // relaxation time, positive

  double omega_c() const { return q * B / m; }
};

// Throws config_error naming the offending field.
void validate_params(const PlasmaParams& p);

// Maxwellian with temperature theta and unit mass density.
double maxwellian(const Vec3& v, const PlasmaParams& p);
double maxwellian_rv(double r, double v3, const PlasmaParams& p);

enum class CrossSectionFamily { Constant, PowerLaw };

// Scattering cross section sigma(s); either constant sigma0 or the mollified
// power law sigma0 (s^2 + delta^2)^(gamma/2).  The declared bounds
// 0 < s_lower <= sigma <= s_upper must hold on the declared relative speed
// range [s_min, s_max]; make_cross_section verifies this at construction.
struct CrossSection {
  CrossSectionFamily family = CrossSectionFamily::Constant;
  double sigma0 = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double s_min = 0.0;   // declared relative-speed range
  double s_max = 10.0;
  double s_lower = 1.0; // verified bounds of sigma on [s_min, s_max]
  double s_upper = 1.0;
};

CrossSection make_cross_section(CrossSectionFamily family, double sigma0, double gamma,
                                double delta, double s_min, double s_max);

double sigma_eval(double s, const CrossSection& cs);

enum class PotentialFamily { None, UniformGradient, Harmonic, Separable };

// Electrostatic potential families:
//   UniformGradient: phi = gradient . x
//   Harmonic:        phi = (c1 x1^2 + c2 x2^2 + c3 x3^2) / 2
//   Separable:       phi = amp cos(k . x_perp + shift)
//                        + a3 x3^2 / 2 + amp3 cos(k3 x3 + shift3)
// The separable perpendicular part is a bounded plane wave, so confinement
// estimates with sup-norm weights apply when a3 = 0.
struct Potential {
  PotentialFamily family = PotentialFamily::None;
  Vec3 gradient{0.0, 0.0, 0.0};
  Vec3 curvature{0.0, 0.0, 0.0};
  double amp = 0.0;
  Vec2 k{1.0, 0.0};
  double shift = 0.0;
  double a3 = 0.0;
  double amp3 = 0.0;
  double k3 = 1.0;
  double shift3 = 0.0;
};

double potential_value(const Vec3& x, const Potential& pot);

// E = -grad phi.
Vec3 efield(const Vec3& x, const Potential& pot);

// Gyroaverage of (perp E, E_3) over the Larmor circle through p, by an
// n_nodes uniform phase rule (n_nodes >= 4).  perp E = (E_2, -E_1).
struct AveragedField {
  Vec2 eperp_avg{0.0, 0.0};
  double e3_avg = 0.0;
};

AveragedField averaged_field_components(const PhasePoint& p, const Potential& pot,
                                        const PlasmaParams& params, int n_nodes);

}  // namespace gyrokin
