#include "gyrokin/gyroaverage.hpp"

#include <cmath>

#include "gyrokin/errors.hpp"
#include "gyrokin/quadrature.hpp"

namespace gyrokin {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_alpha_nodes(const GyroQuadratureConfig& cfg) {
  if (cfg.n_alpha < 4) throw domain_error("gyroaverage: n_alpha must be >= 4");
}

// Orbit point with the same invariants as p and gyrophase alpha.
PhasePoint orbit_point(const InvariantCoords& inv, double alpha, double omega_c) {
  Gyrophase ph;
  ph.alpha = alpha;
  return from_invariants(inv, ph, omega_c);
}
}  // namespace

double velocity_box_halfwidth(const VelocityQuadrature& vq, const PlasmaParams& params) {
  if (vq.l_box > 0.0) return vq.l_box;
  return 7.5 * std::sqrt(params.theta / params.m);
}

double gyroaverage_scalar(const ScalarField& u, const PhasePoint& p, const PlasmaParams& params,
                          const GyroQuadratureConfig& cfg) {
  check_alpha_nodes(cfg);
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  double acc = 0.0;
  for (int j = 0; j < cfg.n_alpha; ++j) {
    double alpha = kTwoPi * static_cast<double>(j) / static_cast<double>(cfg.n_alpha);
    acc += u(orbit_point(inv, alpha, omega_c));
  }
  return acc / static_cast<double>(cfg.n_alpha);
}

double gyroaverage_integral_operator(const std::function<double(const Vec3&, const Vec3&)>& C,
                                     const ScalarField& f, const PhasePoint& p,
                                     const PlasmaParams& params, const GyroQuadratureConfig& cfg,
                                     const VelocityQuadrature& vq) {
  check_alpha_nodes(cfg);
  if (vq.n_per_axis < 2) throw domain_error("gyroaverage: n_per_axis must be >= 2");
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  double l = velocity_box_halfwidth(vq, params);
  Quadrature1D gl = gauss_legendre(static_cast<std::size_t>(vq.n_per_axis), -l, l);

  double acc = 0.0;
  for (int j = 0; j < cfg.n_alpha; ++j) {
    double alpha = kTwoPi * static_cast<double>(j) / static_cast<double>(cfg.n_alpha);
    PhasePoint q = orbit_point(inv, alpha, omega_c);
    Vec3 v{q.v_perp[0], q.v_perp[1], q.v3};
    double inner = 0.0;
    for (std::size_t a = 0; a < gl.nodes.size(); ++a)
      for (std::size_t b = 0; b < gl.nodes.size(); ++b)
        for (std::size_t c = 0; c < gl.nodes.size(); ++c) {
          Vec3 vp{gl.nodes[a], gl.nodes[b], gl.nodes[c]};
          PhasePoint pp;
          pp.x_perp = q.x_perp;
          pp.x3 = q.x3;
          pp.v_perp = {vp[0], vp[1]};
          pp.v3 = vp[2];
          inner += gl.weights[a] * gl.weights[b] * gl.weights[c] * C(v, vp) * f(pp);
        }
    acc += inner;
  }
  return acc / static_cast<double>(cfg.n_alpha);
}

Mat3 scatter_matrix(const Vec3& w) {
  double n2 = dot(w, w);
  if (n2 == 0.0) throw domain_error("scatter_matrix: singular relative velocity w = 0");
  Mat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = (i == j ? 1.0 : 0.0) - w[i] * w[j] / n2;
  return s;
}

TensorAverage gyroaverage_tensor_oracle(const ScalarField& f, TensorAverageVariant variant,
                                        const PhasePoint& p, const PlasmaParams& params,
                                        const CrossSection& cs, const GyroQuadratureConfig& cfg,
                                        const VelocityQuadrature& vq) {
  check_alpha_nodes(cfg);
  double omega_c = params.omega_c();
  auto [inv, ph] = to_invariants(p, omega_c);
  (void)ph;
  double l = velocity_box_halfwidth(vq, params);
  Quadrature1D gl = gauss_legendre(static_cast<std::size_t>(vq.n_per_axis), -l, l);

  TensorAverage out;
  for (int j = 0; j < cfg.n_alpha; ++j) {
    double alpha = kTwoPi * static_cast<double>(j) / static_cast<double>(cfg.n_alpha);
    PhasePoint q = orbit_point(inv, alpha, omega_c);
    Vec3 v{q.v_perp[0], q.v_perp[1], q.v3};
    Vec3 a_left{0.0, 0.0, 0.0};  // contraction vectors built per inner node when primed
    for (std::size_t ia = 0; ia < gl.nodes.size(); ++ia)
      for (std::size_t ib = 0; ib < gl.nodes.size(); ++ib)
        for (std::size_t ic = 0; ic < gl.nodes.size(); ++ic) {
          Vec3 vp{gl.nodes[ia], gl.nodes[ib], gl.nodes[ic]};
          Vec3 w = v - vp;
          double wn = norm(w);
          if (wn == 0.0) continue;
          PhasePoint pp;
          pp.x_perp = q.x_perp;
          pp.x3 = q.x3;
          pp.v_perp = {vp[0], vp[1]};
          pp.v3 = vp[2];
          double wq = gl.weights[ia] * gl.weights[ib] * gl.weights[ic] * sigma_eval(wn, cs) *
                      f(pp) / static_cast<double>(cfg.n_alpha);
          Mat3 s = scatter_matrix(w);
          Vec3 vv{v[0], v[1], 0.0};
          Vec3 pv{v[1], -v[0], 0.0};
          Vec3 vvp{vp[0], vp[1], 0.0};
          Vec3 pvp{vp[1], -vp[0], 0.0};
          auto apply = [&s](const Vec3& a) {
            return Vec3{s[0][0] * a[0] + s[0][1] * a[1] + s[0][2] * a[2],
                        s[1][0] * a[0] + s[1][1] * a[1] + s[1][2] * a[2],
                        s[2][0] * a[0] + s[2][1] * a[1] + s[2][2] * a[2]};
          };
          switch (variant) {
            case TensorAverageVariant::Projection:
              for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) out.tensor[r][c] += wq * s[r][c];
              break;
            case TensorAverageVariant::VectorV:
              a_left = apply(vv);
              for (int r = 0; r < 3; ++r) out.vector[r] += wq * a_left[r];
              break;
            case TensorAverageVariant::VectorVPrime:
              a_left = apply(vvp);
              for (int r = 0; r < 3; ++r) out.vector[r] += wq * a_left[r];
              break;
            case TensorAverageVariant::VectorPerpV:
              a_left = apply(pv);
              for (int r = 0; r < 3; ++r) out.vector[r] += wq * a_left[r];
              break;
            case TensorAverageVariant::VectorPerpVPrime:
              a_left = apply(pvp);
              for (int r = 0; r < 3; ++r) out.vector[r] += wq * a_left[r];
              break;
            case TensorAverageVariant::ScalarVV:
              out.scalar += wq * dot(apply(vv), vv);
              break;
            case TensorAverageVariant::ScalarVPerpV:
              out.scalar += wq * dot(apply(vv), pv);
              break;
            case TensorAverageVariant::ScalarPerpVPerpV:
              out.scalar += wq * dot(apply(pv), pv);
              break;
            case TensorAverageVariant::ScalarVPrimeV:
              out.scalar += wq * dot(apply(vvp), vv);
              break;
            case TensorAverageVariant::ScalarVPrimePerpV:
              out.scalar += wq * dot(apply(vvp), pv);
              break;
            case TensorAverageVariant::ScalarPerpVPrimePerpV:
              out.scalar += wq * dot(apply(pvp), pv);
              break;
          }
        }
  }
  return out;
}

}  // namespace gyrokin
