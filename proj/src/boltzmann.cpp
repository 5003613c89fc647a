#include "gyrokin/boltzmann.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "gyrokin/errors.hpp"
#include "gyrokin/threading.hpp"
#include "ring_pair_tables.hpp"

namespace gyrokin {

namespace {

using detail::RingPairTables;
using PairCache = detail::RingPairTables;
using detail::build_ring_pair_tables;
using detail::maxwellian_table;

PairCache build_pair_cache(const ReducedGrid& grid, const CrossSection& cs, int n_phi,
                           int n_alpha) {
  return build_ring_pair_tables(grid, cs, n_phi, n_alpha);
}

double cell_weight(const ReducedGrid& grid, int irc) { return detail::ring_cell_weight(grid, irc); }

// Accumulates, for every target plane (iv3) of one (x3, r) fiber, the sum
// over source cells and offset nodes of weight * sigma * (shifted source
// plane).  fn(iv3, coef, plane) consumes each shifted plane contribution.
template <typename Fn>
void for_each_gain_plane(const ReducedDensity& g, const BoltzmannAvgConfig& cfg,
                         const PairCache& cache, int ix3, int ir, Fn&& fn) {
  const ReducedGrid& grid = *g.grid;
  const double wc = g.params.omega_c();
  const int n_v3 = grid.n_v3;
  const std::size_t plane = grid.slice_size();
  std::vector<double> shifted(plane), scratch(plane);
  for (int irc = 0; irc < grid.n_r; ++irc) {
    const double wcell = cell_weight(grid, irc);
    const std::size_t pair = static_cast<std::size_t>(ir) * grid.n_r + irc;
    const ChiQuadrature& quad = cache.quads[pair];
    for (int k = 0; k < cache.n_nodes; ++k) {
      const ChiNode& node = quad.nodes[static_cast<std::size_t>(k)];
      const auto taps1 =
          shift_taps(grid.n_y1, grid.dy1(), node.z[0] / wc, cfg.interp);
      const auto taps2 =
          shift_taps(grid.n_y2, grid.dy2(), node.z[1] / wc, cfg.interp);
      const double* sig = &cache.sigma[(pair * cache.n_nodes + k) * n_v3];
      for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
        const double* src = &g.values[grid.index(ix3, irc, iv3c, 0, 0)];
        apply_plane_shift(src, shifted.data(), grid.n_y1, grid.n_y2, taps1, taps2, scratch);
        for (int iv3 = 0; iv3 < n_v3; ++iv3) {
          const double coef = wcell * node.weight * sig[std::abs(iv3 - iv3c)];
          fn(iv3, iv3c, irc, coef, shifted.data());
        }
      }
    }
  }
}

// gain * tau (the 1/tau factor is applied by the callers).
std::vector<double> gain_times_tau(const ReducedDensity& g, const BoltzmannAvgConfig& cfg,
                                   const PairCache& cache, const std::vector<double>& mtab) {
  const ReducedGrid& grid = *g.grid;
  std::vector<double> out(grid.num_nodes(), 0.0);
  const std::size_t plane = grid.slice_size();
  const std::size_t n_fibers = static_cast<std::size_t>(grid.n_x3) * grid.n_r;
  parallel_for(n_fibers, [&](std::size_t fb, std::size_t fe) {
    std::vector<double> acc(static_cast<std::size_t>(grid.n_v3) * plane);
    for (std::size_t fiber = fb; fiber < fe; ++fiber) {
      const int ix3 = static_cast<int>(fiber / grid.n_r);
      const int ir = static_cast<int>(fiber % grid.n_r);
      std::fill(acc.begin(), acc.end(), 0.0);
      for_each_gain_plane(g, cfg, cache, ix3, ir,
                          [&](int iv3, int, int, double coef, const double* shifted) {
                            double* dst = &acc[static_cast<std::size_t>(iv3) * plane];
                            for (std::size_t p = 0; p < plane; ++p) dst[p] += coef * shifted[p];
                          });
      for (int iv3 = 0; iv3 < grid.n_v3; ++iv3) {
        const double m = mtab[static_cast<std::size_t>(ir) * grid.n_v3 + iv3];
        const double* src = &acc[static_cast<std::size_t>(iv3) * plane];
        double* dst = &out[grid.index(ix3, ir, iv3, 0, 0)];
        for (std::size_t p = 0; p < plane; ++p) dst[p] = m * src[p];
      }
    }
  });
  return out;
}

std::vector<double> loss_coefficient_times_tau(const ReducedGrid& grid, const PairCache& cache,
                                               const std::vector<double>& mtab) {
  const int n_v3 = grid.n_v3;
  std::vector<double> lam(static_cast<std::size_t>(grid.n_r) * n_v3, 0.0);
  for (int ir = 0; ir < grid.n_r; ++ir) {
    for (int irc = 0; irc < grid.n_r; ++irc) {
      const double wcell = cell_weight(grid, irc);
      const std::size_t pair = static_cast<std::size_t>(ir) * grid.n_r + irc;
      const ChiQuadrature& quad = cache.quads[pair];
      for (int k = 0; k < cache.n_nodes; ++k) {
        const double wk = wcell * quad.nodes[static_cast<std::size_t>(k)].weight;
        const double* sig = &cache.sigma[(pair * cache.n_nodes + k) * n_v3];
        for (int iv3 = 0; iv3 < n_v3; ++iv3) {
          double s = 0.0;
          for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
            s += sig[std::abs(iv3 - iv3c)] * mtab[static_cast<std::size_t>(irc) * n_v3 + iv3c];
          }
          lam[static_cast<std::size_t>(ir) * n_v3 + iv3] += wk * s;
        }
      }
    }
  }
  return lam;
}

void check_config(const BoltzmannAvgConfig& cfg) {
  if (cfg.n_phi < 2) throw config_error("boltzmann.n_phi: must be at least 2");
  if (cfg.n_alpha < 4 || cfg.n_alpha % 2 != 0)
    throw config_error("boltzmann.n_alpha: must be even and at least 4");
}

}  // namespace

std::vector<double> qb_gain(const ReducedDensity& g, const BoltzmannAvgConfig& cfg) {
  check_config(cfg);
  const PairCache cache = build_pair_cache(*g.grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);
  const std::vector<double> mtab = maxwellian_table(*g.grid, g.params);
  std::vector<double> out = gain_times_tau(g, cfg, cache, mtab);
  const double inv_tau = 1.0 / g.params.tau;
  for (double& v : out) v *= inv_tau;
  return out;
}

std::vector<double> qb_loss_coefficient(const ReducedGrid& grid, const PlasmaParams& params,
                                        const BoltzmannAvgConfig& cfg) {
  check_config(cfg);
  const PairCache cache = build_pair_cache(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);
  const std::vector<double> mtab = maxwellian_table(grid, params);
  std::vector<double> lam = loss_coefficient_times_tau(grid, cache, mtab);
  const double inv_tau = 1.0 / params.tau;
  for (double& v : lam) v *= inv_tau;
  return lam;
}

std::vector<double> qb_loss(const ReducedDensity& g, const BoltzmannAvgConfig& cfg) {
  const ReducedGrid& grid = *g.grid;
  const std::vector<double> lam = qb_loss_coefficient(grid, g.params, cfg);
  std::vector<double> out(grid.num_nodes());
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
      grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
      out[idx] = lam[static_cast<std::size_t>(ir) * grid.n_v3 + iv3] * g.values[idx];
    }
  });
  return out;
}

std::vector<double> apply_qb_avg(const ReducedDensity& g, const BoltzmannAvgConfig& cfg) {
  check_config(cfg);
  const ReducedGrid& grid = *g.grid;
  const PairCache cache = build_pair_cache(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);
  const std::vector<double> mtab = maxwellian_table(grid, g.params);
  std::vector<double> out = gain_times_tau(g, cfg, cache, mtab);
  const std::vector<double> lam = loss_coefficient_times_tau(grid, cache, mtab);
  const double inv_tau = 1.0 / g.params.tau;
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
      grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
      out[idx] = inv_tau * (out[idx] -
                            lam[static_cast<std::size_t>(ir) * grid.n_v3 + iv3] * g.values[idx]);
    }
  });
  return out;
}

double qb_entropy_production(const ReducedDensity& g, const BoltzmannAvgConfig& cfg) {
  check_config(cfg);
  const ReducedGrid& grid = *g.grid;
  const PairCache cache = build_pair_cache(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);
  const std::vector<double> mtab = maxwellian_table(grid, g.params);

  // Ratio h = g/M on the grid and its square; M is evaluated analytically.
  ReducedDensity h = g;
  for (std::size_t idx = 0; idx < h.values.size(); ++idx) {
    int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
    grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
    h.values[idx] /= mtab[static_cast<std::size_t>(ir) * grid.n_v3 + iv3];
  }
  ReducedDensity hsq = h;
  for (double& v : hsq.values) v *= v;

  const std::size_t plane = grid.slice_size();
  const std::size_t n_fibers = static_cast<std::size_t>(grid.n_x3) * grid.n_r;
  std::vector<double> partial(n_fibers, 0.0);
  const double slab_measure = grid.dy1() * grid.dy2() * grid.dx3();
  parallel_for(n_fibers, [&](std::size_t fb, std::size_t fe) {
    for (std::size_t fiber = fb; fiber < fe; ++fiber) {
      const int ix3 = static_cast<int>(fiber / grid.n_r);
      const int ir = static_cast<int>(fiber % grid.n_r);
      const double mu = cell_weight(grid, ir) * slab_measure;
      double acc = 0.0;
      // The interpolation taps spread each source plane over neighboring
      // guiding centers, so the squared difference is expanded against the
      // tap weights (whose rows sum to one):
      //   sum_q T(p,q) (h_p - h'_q)^2 = h_p^2 - 2 h_p (T h')_p + (T h'^2)_p.
      // This keeps the form equal to the pairing <Q g, g/M> to rounding.
      for_each_gain_plane(h, cfg, cache, ix3, ir,
                          [&](int iv3, int iv3c, int irc, double coef, const double* shifted) {
                            const double mm =
                                mtab[static_cast<std::size_t>(ir) * grid.n_v3 + iv3] *
                                mtab[static_cast<std::size_t>(irc) * grid.n_v3 + iv3c];
                            const double* hn = &h.values[grid.index(ix3, ir, iv3, 0, 0)];
                            double s = 0.0;
                            for (std::size_t p = 0; p < plane; ++p)
                              s += hn[p] * (hn[p] - 2.0 * shifted[p]);
                            acc += coef * mm * s;
                          });
      for_each_gain_plane(hsq, cfg, cache, ix3, ir,
                          [&](int iv3, int iv3c, int irc, double coef, const double* shifted) {
                            const double mm =
                                mtab[static_cast<std::size_t>(ir) * grid.n_v3 + iv3] *
                                mtab[static_cast<std::size_t>(irc) * grid.n_v3 + iv3c];
                            double s = 0.0;
                            for (std::size_t p = 0; p < plane; ++p) s += shifted[p];
                            acc += coef * mm * s;
                          });
      partial[fiber] = mu * acc;
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return -0.5 * total / g.params.tau;
}

}  // namespace gyrokin
