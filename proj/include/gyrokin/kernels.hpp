#pragma once

#include <array>
#include <vector>

#include "gyrokin/gyroaverage.hpp"
#include "gyrokin/physics.hpp"
#include "gyrokin/vec.hpp"

namespace gyrokin {

// Reduced collision geometry: gyration radii (r, r_p), axial velocities
// (v3, v3_p) and the scaled guiding-center offset z (in omega_c * x units).
struct KernelPoint {
  double r = 0.0;
  double v3 = 0.0;
  double r_p = 0.0;
  double v3_p = 0.0;
  Vec2 z{0.0, 0.0};
};

// Interaction weight between Larmor circles of radii r, r_p at center
// offset |z|; supported on |r - r_p| < |z| < r + r_p, normalized so the
// z-integral over the plane equals 1.  Returns 0 off the open support.
double chi(double r, double r_p, double z_norm);

// Angle phi in (0, pi) between the two gyration velocities at interaction:
// |z|^2 = r^2 + r_p^2 - 2 r r_p cos(phi).  Domain error off the support.
double phi_angle(double r, double r_p, double z_norm);

// Angle psi in (0, pi) locating z relative to the unprimed velocity:
// r_p^2 = r^2 + |z|^2 + 2 r |z| cos(psi).  Domain error off the support.
double psi_angle(double r, double r_p, double z_norm);

// sigma evaluated at the reduced relative speed sqrt(|z|^2 + (v3 - v3_p)^2).
double avg_sigma(const KernelPoint& kp, const CrossSection& cs);

// sigma chi S((perp z, v3_p - v3)): the averaged projection tensor.
// Errors when z = 0 and v3 = v3_p (singular relative velocity).
Mat3 avg_projection_tensor(const KernelPoint& kp, const CrossSection& cs);

// The four averaged vector kernels, in the order of the contraction vectors
// (v_perp,0), (v_perp',0), (perp v_perp,0), (perp v_perp',0); each already
// carries the sigma chi weight.
std::array<Vec3, 4> avg_vector_kernels(const KernelPoint& kp, const CrossSection& cs);

// The six averaged scalar contractions (sigma chi times the closed-form
// brace); entries 2 and 5 vanish identically by parity.
std::array<double, 6> scalar_contractions(const KernelPoint& kp, const CrossSection& cs);

// Bare diffusion directions (the sigma chi weight stripped) at explicit
// gyration direction n_hat = v_perp / r; components ordered
// (x1, x2, x3, v1, v2, v3) with positions measured in omega_c * x units.
std::array<Vec6, 4> xi_bare(const KernelPoint& kp, const Vec2& n_hat);

// Diffusion directions including the (sigma chi)^(1/2) weight, from full
// phase coordinates; zero off the interaction support.
std::array<Vec6, 4> xi_fields(const Vec2& xbar, const Vec3& v, const Vec2& xbar_p,
                              const Vec3& v_p, const PlasmaParams& params,
                              const CrossSection& cs);

// Gain diffusion tensor (bare): the four-term closed form.  Symmetric
// positive semidefinite with nullity >= 2; equals sum_i xi_bare^i (x) xi_bare^i.
Mat6 a_plus(const KernelPoint& kp, const Vec2& n_hat);

// Loss coupling tensor (bare): equals sum_i eps_i xi_bare^i (x) xi_bare^i',
// where the primed directions swap (r, v3, n_hat) with (r_p, v3_p, n_hat_p)
// and flip z.  eps = (-1, -1, +1, +1).
Mat6 a_minus(const KernelPoint& kp, const Vec2& n_hat, const Vec2& n_hat_p);

inline constexpr std::array<double, 4> xi_signs{-1.0, -1.0, 1.0, 1.0};

// Swapped kernel geometry: (r, v3) <-> (r_p, v3_p), z -> -z.
KernelPoint swap_kernel_point(const KernelPoint& kp);

// Quadrature in the center-offset plane equivalent to integration against
// chi(r, r_p, z) dz: nodes z = l(phi_k) e^{i alpha_j} with l(phi) the chord
// length, Gauss-Legendre in phi on (0, pi), uniform in alpha (n_alpha even,
// so the node set is symmetric under z -> -z).  Weights sum to 1 exactly.
struct ChiNode {
  Vec2 z{0.0, 0.0};
  double l = 0.0;
  double phi = 0.0;
  double weight = 0.0;
};

struct ChiQuadrature {
  std::vector<ChiNode> nodes;
};

ChiQuadrature chi_quadrature(double r, double r_p, int n_phi, int n_alpha);

}  // namespace gyrokin
