#include "gyrokin/reference_ops.hpp"

#include <cmath>

#include "gyrokin/errors.hpp"
#include "gyrokin/quadrature.hpp"

namespace gyrokin {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double octant_box_integral(const std::function<double(const Vec3&)>& fn, double l,
                           int n_per_axis) {
  if (n_per_axis < 2) throw domain_error("octant_box_integral: n_per_axis must be >= 2");
  Quadrature1D gl = gauss_legendre(static_cast<std::size_t>(n_per_axis), 0.0, l);
  double acc = 0.0;
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      for (int sz = -1; sz <= 1; sz += 2)
        for (std::size_t a = 0; a < gl.nodes.size(); ++a)
          for (std::size_t b = 0; b < gl.nodes.size(); ++b)
            for (std::size_t c = 0; c < gl.nodes.size(); ++c) {
              Vec3 w{sx * gl.nodes[a], sy * gl.nodes[b], sz * gl.nodes[c]};
              acc += gl.weights[a] * gl.weights[b] * gl.weights[c] * fn(w);
            }
  return acc;
}

double full_coordinate_relaxation_rate(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                       const PlasmaParams& params, const CrossSection& cs,
                                       const VelocityQuadrature& vq) {
  double l = velocity_box_halfwidth(vq, params) + norm(v);
  double fv = f.value(x, v);
  double mv = maxwellian(v, params);
  double gain = octant_box_integral(
      [&](const Vec3& w) {
        double wn = norm(w);
        if (wn == 0.0) return 0.0;
        return sigma_eval(wn, cs) * f.value(x, v + w);
      },
      l, vq.n_per_axis);
  double loss = octant_box_integral(
      [&](const Vec3& w) {
        double wn = norm(w);
        if (wn == 0.0) return 0.0;
        return sigma_eval(wn, cs) * maxwellian(v + w, params);
      },
      l, vq.n_per_axis);
  return (mv * gain - fv * loss) / params.tau;
}

double gyroaveraged_relaxation_rate(const SmoothDensity& f, const PhasePoint& p,
                                    const PlasmaParams& params, const CrossSection& cs,
                                    const GyroQuadratureConfig& cfg,
                                    const VelocityQuadrature& vq) {
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  double acc = 0.0;
  for (int j = 0; j < cfg.n_alpha; ++j) {
    Gyrophase a{kTwoPi * static_cast<double>(j) / static_cast<double>(cfg.n_alpha)};
    PhasePoint q = from_invariants(inv, a, omega_c);
    acc += full_coordinate_relaxation_rate(f, {q.x_perp[0], q.x_perp[1], q.x3},
                                           {q.v_perp[0], q.v_perp[1], q.v3}, params, cs, vq);
  }
  return acc / static_cast<double>(cfg.n_alpha);
}

double full_coordinate_landau_rate(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                   const PlasmaParams& params, const CrossSection& cs,
                                   const VelocityQuadrature& vq) {
  double l = velocity_box_halfwidth(vq, params) + norm(v);
  double fv = f.value(x, v);
  Vec3 gv = f.vgrad(x, v);
  Mat3 hv = f.vhess(x, v);
  return octant_box_integral(
      [&](const Vec3& w) {
        double w2 = dot(w, w);
        if (w2 == 0.0) return 0.0;
        double s = sigma_eval(std::sqrt(w2), cs);
        Vec3 vp = v + w;
        double fp = f.value(x, vp);
        Vec3 gp = f.vgrad(x, vp);
        // div_v of sigma S (f' grad f - f grad' f'):
        //   -2 sigma w/|w|^2 . (f' grad f - f grad' f')
        //   + sigma S : (f' hess f - grad f (x) grad' f').
        Vec3 d{fp * gv[0] - fv * gp[0], fp * gv[1] - fv * gp[1], fp * gv[2] - fv * gp[2]};
        double term1 = -2.0 * s * dot(w, d) / w2;
        double term2 = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double sij = (i == j ? 1.0 : 0.0) - w[i] * w[j] / w2;
            term2 += sij * (fp * hv[i][j] - gv[i] * gp[j]);
          }
        return term1 + s * term2;
      },
      l, vq.n_per_axis);
}

double full_coordinate_landau_rate_fd(const SmoothDensity& f, const Vec3& x, const Vec3& v,
                                      const PlasmaParams& params, const CrossSection& cs,
                                      const VelocityQuadrature& vq, double h) {
  // Flux component k at velocity u; the integration box tracks u so the
  // kink stays at a quadrature cell corner.
  auto flux = [&](const Vec3& u, int k) {
    double l = velocity_box_halfwidth(vq, params) + norm(u);
    double fu = f.value(x, u);
    Vec3 gu = f.vgrad(x, u);
    return octant_box_integral(
        [&](const Vec3& w) {
          double w2 = dot(w, w);
          if (w2 == 0.0) return 0.0;
          double s = sigma_eval(std::sqrt(w2), cs);
          Vec3 vp = u + w;
          double fp = f.value(x, vp);
          Vec3 gp = f.vgrad(x, vp);
          Vec3 d{fp * gu[0] - fu * gp[0], fp * gu[1] - fu * gp[1], fp * gu[2] - fu * gp[2]};
          double out = 0.0;
          for (int j = 0; j < 3; ++j)
            out += (((k == j) ? 1.0 : 0.0) - w[k] * w[j] / w2) * d[j];
          return s * out;
        },
        l, vq.n_per_axis);
  };
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    Vec3 vp = v, vm = v;
    vp[k] += h;
    vm[k] -= h;
    acc += (flux(vp, k) - flux(vm, k)) / (2.0 * h);
  }
  return acc;
}

double gyroaveraged_landau_rate(const SmoothDensity& f, const PhasePoint& p,
                                const PlasmaParams& params, const CrossSection& cs,
                                const GyroQuadratureConfig& cfg, const VelocityQuadrature& vq) {
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  double acc = 0.0;
  for (int j = 0; j < cfg.n_alpha; ++j) {
    Gyrophase a{kTwoPi * static_cast<double>(j) / static_cast<double>(cfg.n_alpha)};
    PhasePoint q = from_invariants(inv, a, omega_c);
    acc += full_coordinate_landau_rate(f, {q.x_perp[0], q.x_perp[1], q.x3},
                                       {q.v_perp[0], q.v_perp[1], q.v3}, params, cs, vq);
  }
  return acc / static_cast<double>(cfg.n_alpha);
}

}  // namespace gyrokin
