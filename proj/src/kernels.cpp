#include "gyrokin/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "gyrokin/errors.hpp"
#include "gyrokin/quadrature.hpp"

namespace gyrokin {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

bool on_support(double r, double r_p, double z_norm) {
  return z_norm > std::abs(r - r_p) && z_norm < r + r_p;
}

void require_support(double r, double r_p, double z_norm, const char* where) {
  if (!(r > 0.0) || !(r_p > 0.0))
    throw domain_error(std::string(where) + ": gyration radii must be positive");
  if (!on_support(r, r_p, z_norm))
    throw domain_error(std::string(where) + ": |z| outside (|r - r_p|, r + r_p)");
}

double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

// Shared geometry of a kernel point on the support.
struct KernelGeometry {
  double znorm, phi, cphi, sphi, dv, d2, sigma, chi_w;
};

KernelGeometry geometry(const KernelPoint& kp, const CrossSection& cs, const char* where) {
  KernelGeometry g;
  g.znorm = norm(kp.z);
  require_support(kp.r, kp.r_p, g.znorm, where);
  g.cphi = clamp_cos((kp.r * kp.r + kp.r_p * kp.r_p - g.znorm * g.znorm) / (2.0 * kp.r * kp.r_p));
  g.phi = std::acos(g.cphi);
  g.sphi = std::sin(g.phi);
  g.dv = kp.v3 - kp.v3_p;
  g.d2 = g.znorm * g.znorm + g.dv * g.dv;
  g.sigma = sigma_eval(std::sqrt(g.d2), cs);
  g.chi_w = chi(kp.r, kp.r_p, g.znorm);
  return g;
}
}  // namespace

double chi(double r, double r_p, double z_norm) {
  double lo = std::abs(r - r_p), hi = r + r_p;
  if (!(z_norm > lo) || !(z_norm < hi)) return 0.0;
  double a = z_norm * z_norm - lo * lo;
  double b = hi * hi - z_norm * z_norm;
  return 1.0 / (kPi * kPi * std::sqrt(a * b));
}

double phi_angle(double r, double r_p, double z_norm) {
  require_support(r, r_p, z_norm, "phi_angle");
  return std::acos(clamp_cos((r * r + r_p * r_p - z_norm * z_norm) / (2.0 * r * r_p)));
}

double psi_angle(double r, double r_p, double z_norm) {
  require_support(r, r_p, z_norm, "psi_angle");
  return std::acos(clamp_cos((r_p * r_p - r * r - z_norm * z_norm) / (2.0 * r * z_norm)));
}

double avg_sigma(const KernelPoint& kp, const CrossSection& cs) {
  double znorm = norm(kp.z);
  double dv = kp.v3 - kp.v3_p;
  return sigma_eval(std::sqrt(znorm * znorm + dv * dv), cs);
}

Mat3 avg_projection_tensor(const KernelPoint& kp, const CrossSection& cs) {
  double dv = kp.v3_p - kp.v3;
  Vec3 w{kp.z[1], -kp.z[0], dv};
  if (dot(w, w) == 0.0)
    throw domain_error("avg_projection_tensor: singular relative velocity (z = 0, v3 = v3_p)");
  double weight = avg_sigma(kp, cs) * chi(kp.r, kp.r_p, norm(kp.z));
  Mat3 s = scatter_matrix(w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] *= weight;
  return s;
}

std::array<Vec3, 4> avg_vector_kernels(const KernelPoint& kp, const CrossSection& cs) {
  KernelGeometry g = geometry(kp, cs, "avg_vector_kernels");
  double sc = g.sigma * g.chi_w;
  double z2 = g.znorm * g.znorm;
  double cv = kp.r * kp.r - kp.r * kp.r_p * g.cphi;      // r^2 - r r' cos(phi)
  double cvp = kp.r_p * kp.r_p - kp.r * kp.r_p * g.cphi; // r'^2 - r r' cos(phi)
  Vec2 pz = perp(kp.z);
  std::array<Vec3, 4> out;
  // (v_perp, 0) and (v_perp', 0): even contractions, supported on (perp z, dv).
  double f1 = -sc * cv / g.d2;
  out[0] = {f1 * g.dv * g.dv / z2 * pz[0], f1 * g.dv * g.dv / z2 * pz[1], f1 * g.dv};
  double f2 = sc * cvp / g.d2;
  out[1] = {f2 * g.dv * g.dv / z2 * pz[0], f2 * g.dv * g.dv / z2 * pz[1], f2 * g.dv};
  // (perp v_perp, 0) and (perp v_perp', 0): odd contractions, supported on (z, 0).
  double f3 = sc * cv / z2;
  out[2] = {f3 * kp.z[0], f3 * kp.z[1], 0.0};
  double f4 = -sc * cvp / z2;
  out[3] = {f4 * kp.z[0], f4 * kp.z[1], 0.0};
  return out;
}

std::array<double, 6> scalar_contractions(const KernelPoint& kp, const CrossSection& cs) {
  KernelGeometry g = geometry(kp, cs, "scalar_contractions");
  double sc = g.sigma * g.chi_w;
  double r = kp.r, rp = kp.r_p;
  double s2 = g.sphi * g.sphi;
  std::array<double, 6> out{};
  out[0] = sc * (r * r - r * r * (r - rp * g.cphi) * (r - rp * g.cphi) / g.d2);
  out[1] = 0.0;
  out[2] = sc * (r * r - r * r * rp * rp * s2 / g.d2);
  out[3] = sc * (r * rp * g.cphi -
                 r * rp * (r * g.cphi - rp) * (r - rp * g.cphi) / g.d2);
  out[4] = 0.0;
  out[5] = sc * (r * rp * g.cphi - r * r * rp * rp * s2 / g.d2);
  return out;
}

std::array<Vec6, 4> xi_bare(const KernelPoint& kp, const Vec2& n_hat) {
  double znorm = norm(kp.z);
  require_support(kp.r, kp.r_p, znorm, "xi_bare");
  double cphi = clamp_cos((kp.r * kp.r + kp.r_p * kp.r_p - znorm * znorm) /
                          (2.0 * kp.r * kp.r_p));
  double sphi = std::sin(std::acos(cphi));
  double dv = kp.v3 - kp.v3_p;
  double d = std::sqrt(znorm * znorm + dv * dv);
  Vec2 pn = perp(n_hat);
  Vec2 pz = perp(kp.z);
  // u6 = ((n,0), (perp n,0)), w6 = ((perp n,0), (-n,0)), both unit 6-vectors.
  Vec6 u6{n_hat[0], n_hat[1], 0.0, pn[0], pn[1], 0.0};
  Vec6 w6{pn[0], pn[1], 0.0, -n_hat[0], -n_hat[1], 0.0};
  Vec6 zp6{pz[0] / znorm, pz[1] / znorm, 0.0, 0.0, 0.0, 0.0};
  Vec6 t6{dv * kp.z[0] / (znorm * d), dv * kp.z[1] / (znorm * d), 0.0, 0.0, 0.0, -znorm / d};

  std::array<Vec6, 4> xi;
  xi[0] = (kp.r_p * sphi * dv / (znorm * d)) * u6;
  xi[1] = ((kp.r - kp.r_p * cphi) / znorm) * u6 + zp6;
  xi[2] = (kp.r_p * sphi / znorm) * w6;
  xi[3] = ((kp.r_p * cphi - kp.r) * dv / (znorm * d)) * w6 + t6;
  return xi;
}

KernelPoint swap_kernel_point(const KernelPoint& kp) {
  KernelPoint s;
  s.r = kp.r_p;
  s.v3 = kp.v3_p;
  s.r_p = kp.r;
  s.v3_p = kp.v3;
  s.z = {-kp.z[0], -kp.z[1]};
  return s;
}

std::array<Vec6, 4> xi_fields(const Vec2& xbar, const Vec3& v, const Vec2& xbar_p,
                              const Vec3& v_p, const PlasmaParams& params,
                              const CrossSection& cs) {
  double omega_c = params.omega_c();
  Vec2 vperp{v[0], v[1]}, vperp_p{v_p[0], v_p[1]};
  KernelPoint kp;
  kp.r = norm(vperp);
  kp.v3 = v[2];
  kp.r_p = norm(vperp_p);
  kp.v3_p = v_p[2];
  kp.z = omega_c * (xbar - xbar_p) + perp(vperp) - perp(vperp_p);
  double znorm = norm(kp.z);
  std::array<Vec6, 4> out{};
  if (!(kp.r > 0.0) || !(kp.r_p > 0.0) || !on_support(kp.r, kp.r_p, znorm)) return out;
  double weight = std::sqrt(avg_sigma(kp, cs) * chi(kp.r, kp.r_p, znorm));
  Vec2 n_hat{vperp[0] / kp.r, vperp[1] / kp.r};
  std::array<Vec6, 4> bare = xi_bare(kp, n_hat);
  for (int i = 0; i < 4; ++i) out[i] = weight * bare[i];
  return out;
}

Mat6 a_plus(const KernelPoint& kp, const Vec2& n_hat) {
  double znorm = norm(kp.z);
  require_support(kp.r, kp.r_p, znorm, "a_plus");
  double cphi = clamp_cos((kp.r * kp.r + kp.r_p * kp.r_p - znorm * znorm) /
                          (2.0 * kp.r * kp.r_p));
  double sphi = std::sin(std::acos(cphi));
  double dv = kp.v3 - kp.v3_p;
  double d2 = znorm * znorm + dv * dv;
  Vec2 pn = perp(n_hat);
  Vec2 pz = perp(kp.z);
  Vec6 u6{n_hat[0], n_hat[1], 0.0, pn[0], pn[1], 0.0};
  Vec6 w6{pn[0], pn[1], 0.0, -n_hat[0], -n_hat[1], 0.0};
  Vec6 zp6{pz[0] / znorm, pz[1] / znorm, 0.0, 0.0, 0.0, 0.0};
  Vec6 t6{dv * kp.z[0] / (znorm * std::sqrt(d2)), dv * kp.z[1] / (znorm * std::sqrt(d2)), 0.0,
          0.0, 0.0, -znorm / std::sqrt(d2)};

  double rp2s2 = kp.r_p * kp.r_p * sphi * sphi;
  Mat6 m{};
  auto add = [&m](double c, const Vec6& a, const Vec6& b) {
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m[i][j] += c * a[i] * b[j];
  };
  add(rp2s2 * dv * dv / (znorm * znorm * d2), u6, u6);
  Vec6 e2 = ((kp.r - kp.r_p * cphi) / znorm) * u6 + zp6;
  add(1.0, e2, e2);
  add(rp2s2 / (znorm * znorm), w6, w6);
  Vec6 e4 = ((kp.r_p * cphi - kp.r) * dv / (znorm * std::sqrt(d2))) * w6 + t6;
  add(1.0, e4, e4);
  return m;
}

Mat6 a_minus(const KernelPoint& kp, const Vec2& n_hat, const Vec2& n_hat_p) {
  double znorm = norm(kp.z);
  require_support(kp.r, kp.r_p, znorm, "a_minus");
  double cphi = clamp_cos((kp.r * kp.r + kp.r_p * kp.r_p - znorm * znorm) /
                          (2.0 * kp.r * kp.r_p));
  double sphi = std::sin(std::acos(cphi));
  double dv = kp.v3 - kp.v3_p;
  double d = std::sqrt(znorm * znorm + dv * dv);
  double d2 = d * d;
  Vec2 pn = perp(n_hat), pnp = perp(n_hat_p);
  Vec2 pz = perp(kp.z);
  Vec6 u6{n_hat[0], n_hat[1], 0.0, pn[0], pn[1], 0.0};
  Vec6 u6p{n_hat_p[0], n_hat_p[1], 0.0, pnp[0], pnp[1], 0.0};
  Vec6 w6{pn[0], pn[1], 0.0, -n_hat[0], -n_hat[1], 0.0};
  Vec6 w6p{pnp[0], pnp[1], 0.0, -n_hat_p[0], -n_hat_p[1], 0.0};
  Vec6 zp6{pz[0] / znorm, pz[1] / znorm, 0.0, 0.0, 0.0, 0.0};
  Vec6 t6{dv * kp.z[0] / (znorm * d), dv * kp.z[1] / (znorm * d), 0.0, 0.0, 0.0, -znorm / d};

  Mat6 m{};
  auto add = [&m](double c, const Vec6& a, const Vec6& b) {
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m[i][j] += c * a[i] * b[j];
  };
  add(kp.r * kp.r_p * sphi * sphi * dv * dv / (znorm * znorm * d2), u6, u6p);
  Vec6 e2l = ((kp.r - kp.r_p * cphi) / znorm) * u6 + zp6;
  Vec6 e2r = ((kp.r * cphi - kp.r_p) / znorm) * u6p + zp6;
  add(1.0, e2l, e2r);
  add(kp.r * kp.r_p * sphi * sphi / (znorm * znorm), w6, w6p);
  Vec6 e4l = ((kp.r_p * cphi - kp.r) * dv / (znorm * d)) * w6 + t6;
  Vec6 e4r = ((kp.r_p - kp.r * cphi) * dv / (znorm * d)) * w6p + t6;
  add(1.0, e4l, e4r);
  return m;
}

ChiQuadrature chi_quadrature(double r, double r_p, int n_phi, int n_alpha) {
  if (!(r > 0.0) || !(r_p > 0.0))
    throw domain_error("chi_quadrature: gyration radii must be positive");
  if (n_phi < 2) throw domain_error("chi_quadrature: n_phi must be >= 2");
  if (n_alpha < 4 || n_alpha % 2 != 0)
    throw domain_error("chi_quadrature: n_alpha must be even and >= 4");
  Quadrature1D gl = gauss_legendre(static_cast<std::size_t>(n_phi), 0.0, kPi);
  ChiQuadrature q;
  q.nodes.reserve(static_cast<std::size_t>(n_phi * n_alpha));
  for (int k = 0; k < n_phi; ++k) {
    double phi = gl.nodes[static_cast<std::size_t>(k)];
    double l = std::sqrt(r * r + r_p * r_p - 2.0 * r * r_p * std::cos(phi));
    double w = gl.weights[static_cast<std::size_t>(k)] / (kPi * static_cast<double>(n_alpha));
    for (int j = 0; j < n_alpha; ++j) {
      double alpha = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_alpha);
      ChiNode node;
      node.z = {l * std::cos(alpha), l * std::sin(alpha)};
      node.l = l;
      node.phi = phi;
      node.weight = w;
      q.nodes.push_back(node);
    }
  }
  return q;
}

}  // namespace gyrokin
