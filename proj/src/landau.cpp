#include "gyrokin/landau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "gyrokin/errors.hpp"
#include "gyrokin/threading.hpp"
#include "ring_pair_tables.hpp"

namespace gyrokin {

namespace {

using detail::build_ring_pair_tables;
using detail::ring_cell_weight;
using detail::RingPairTables;

void check_config(const FplConfig& cfg) {
  if (cfg.n_phi < 2) throw config_error("landau.n_phi: must be at least 2");
  if (cfg.n_alpha < 4 || cfg.n_alpha % 2 != 0)
    throw config_error("landau.n_alpha: must be even and at least 4");
  if (!(cfg.positivity_floor > 0.0))
    throw config_error("landau.positivity_floor: must be positive");
}

// One gyration branch of the collision geometry at an offset node: the
// directions of the two colliding perpendicular velocities.  For fixed rings
// (r, r') and center offset z the velocities solve |v| = r, |v - iz| = r'
// (iz the quarter-turn of z), which has two mirror solutions.
struct Branch {
  Vec2 n{0.0, 0.0};   // target velocity direction
  Vec2 np{0.0, 0.0};  // partner velocity direction
};

// Both branches carry half of the chi weight.  Averaging them reproduces the
// exact double gyroaverage and makes the discrete sum invariant under the
// exchange (target ring, z, branch) <-> (source ring, -z, other branch),
// which is what carries the conservation identities over to the grid.
std::array<Branch, 2> make_branches(const Vec2& z, double l, double r, double r_p) {
  const double cpsi = std::clamp((r_p * r_p - r * r - l * l) / (2.0 * r * l), -1.0, 1.0);
  const double spsi = std::sqrt(std::max(0.0, 1.0 - cpsi * cpsi));
  const Vec2 zh{z[0] / l, z[1] / l};
  const Vec2 izh{-zh[1], zh[0]};
  std::array<Branch, 2> out;
  for (int b = 0; b < 2; ++b) {
    const double s = (b == 0) ? spsi : -spsi;
    Branch& f = out[b];
    f.n = {-s * zh[0] - cpsi * izh[0], -s * zh[1] - cpsi * izh[1]};
    const Vec2 vp{r * f.n[0] - l * izh[0], r * f.n[1] - l * izh[1]};
    const double vn = std::hypot(vp[0], vp[1]);  // equals r_p analytically
    f.np = {vp[0] / vn, vp[1] / vn};
  }
  return out;
}

// Contractions of a phase vector with the gradients of the four transported
// invariants (y1, y2, r, v3) at gyration direction n; the x3 contraction
// vanishes identically for every kernel direction.
std::array<double, 4> invariant_contractions(const Vec6& xi, const Vec2& n, double wc) {
  return {(xi[0] + xi[4]) / wc, (xi[1] - xi[3]) / wc, xi[3] * n[0] + xi[4] * n[1], xi[5]};
}

// Coefficient row such that xi . (full gradient assembled from the five
// derivative fields d at gyration direction n) = sum_j row[j] * d_j.
std::array<double, 5> gradient_row(const Vec6& xi, const Vec2& n, double wc) {
  return {(xi[0] + xi[4]) / wc, (xi[1] - xi[3]) / wc, xi[2] / wc,
          xi[3] * n[0] + xi[4] * n[1], xi[5]};
}

// Kernel directions of one branch at one (offset node, v3 pair).
struct BranchKernels {
  Branch frame;
  std::array<Vec6, 4> xi;   // target-point directions
  std::array<Vec6, 4> xip;  // swapped-point directions
};

BranchKernels make_branch_kernels(const KernelPoint& kp, const Branch& f) {
  return {f, xi_bare(kp, f.n), xi_bare(swap_kernel_point(kp), f.np)};
}

// Branch-averaged coefficient rows of the four flux components (y1, y2, r,
// v3).  gain[k] contracts the local derivative planes, loss[k] the shifted
// ones; the quadratic dependence on the kernel directions makes each row
// insensitive to their overall sign, so both branches can be evaluated with
// the same direction formulas.
struct FluxRows {
  std::array<std::array<double, 5>, 4> gain{};
  std::array<std::array<double, 5>, 4> loss{};
};

FluxRows make_flux_rows(const KernelPoint& kp, const std::array<Branch, 2>& branches,
                        double wc) {
  FluxRows out{};
  for (const Branch& f : branches) {
    const BranchKernels bk = make_branch_kernels(kp, f);
    std::array<Vec6, 4> q{};
    std::array<Vec6, 4> qt{};
    for (int i = 0; i < 4; ++i) {
      const std::array<double, 4> c = invariant_contractions(bk.xi[i], f.n, wc);
      for (int k = 0; k < 4; ++k) {
        q[k] = q[k] + c[k] * bk.xi[i];
        qt[k] = qt[k] + (xi_signs[i] * c[k]) * bk.xip[i];
      }
    }
    for (int k = 0; k < 4; ++k) {
      const std::array<double, 5> gr = gradient_row(q[k], f.n, wc);
      const std::array<double, 5> lr = gradient_row(qt[k], f.np, wc);
      for (int j = 0; j < 5; ++j) {
        out.gain[k][j] += 0.5 * gr[j];
        out.loss[k][j] += 0.5 * lr[j];
      }
    }
  }
  return out;
}

ReducedDensity sample_field(const ReducedDensity& like, const InvariantField& phi) {
  const ReducedGrid& grid = *like.grid;
  ReducedDensity s = make_density(like.grid, like.params);
  for (std::size_t idx = 0; idx < s.values.size(); ++idx) {
    int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
    grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
    InvariantCoords c;
    c.y = {grid.y1(iy1), grid.y2(iy2)};
    c.x3 = grid.x3(ix3);
    c.r = grid.r(ir);
    c.v3 = grid.v3(iv3);
    s.values[idx] = phi(c);
  }
  return s;
}

}  // namespace

std::vector<double> apply_qfpl_avg(const ReducedDensity& g, const FplConfig& cfg) {
  check_config(cfg);
  const ReducedGrid& grid = *g.grid;
  const double wc = g.params.omega_c();
  const int n_r = grid.n_r;
  const int n_v3 = grid.n_v3;
  const std::size_t plane = grid.slice_size();
  const RingPairTables tables =
      build_ring_pair_tables(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);
  const std::array<std::vector<double>, 5> d = gradient_fields(g);

  std::array<std::vector<double>, 5> flux;
  for (auto& f : flux) f.assign(grid.num_nodes(), 0.0);
  const int axes[4] = {0, 1, 3, 4};  // x3 flux vanishes identically

  const std::size_t n_fibers = static_cast<std::size_t>(grid.n_x3) * n_r;
  parallel_for(n_fibers, [&](std::size_t fb, std::size_t fe) {
    // shifted[(f * n_v3 + iv3c) * plane + p], field order (g, d0..d4)
    std::vector<double> shifted(6 * static_cast<std::size_t>(n_v3) * plane);
    std::vector<double> scratch(plane);
    for (std::size_t fiber = fb; fiber < fe; ++fiber) {
      const int ix3 = static_cast<int>(fiber / n_r);
      const int ir = static_cast<int>(fiber % n_r);
      for (int irc = 0; irc < n_r; ++irc) {
        const double wcell = ring_cell_weight(grid, irc);
        const ChiQuadrature& quad = tables.quads[static_cast<std::size_t>(ir) * n_r + irc];
        for (int k = 0; k < tables.n_nodes; ++k) {
          const ChiNode& node = quad.nodes[static_cast<std::size_t>(k)];
          const auto branches = make_branches(node.z, node.l, grid.r(ir), grid.r(irc));
          const auto taps1 = shift_taps(grid.n_y1, grid.dy1(), node.z[0] / wc, cfg.interp);
          const auto taps2 = shift_taps(grid.n_y2, grid.dy2(), node.z[1] / wc, cfg.interp);
          for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
            const std::size_t src = grid.index(ix3, irc, iv3c, 0, 0);
            apply_plane_shift(&g.values[src], &shifted[static_cast<std::size_t>(iv3c) * plane],
                              grid.n_y1, grid.n_y2, taps1, taps2, scratch);
            for (int f = 0; f < 5; ++f)
              apply_plane_shift(
                  &d[f][src],
                  &shifted[(static_cast<std::size_t>(f + 1) * n_v3 + iv3c) * plane],
                  grid.n_y1, grid.n_y2, taps1, taps2, scratch);
          }
          const double* sig = tables.sigma_row(ir, irc, k, n_r, n_v3);
          for (int iv3 = 0; iv3 < n_v3; ++iv3) {
            const std::size_t base = grid.index(ix3, ir, iv3, 0, 0);
            const double* gl = &g.values[base];
            const double* dl[5];
            for (int f = 0; f < 5; ++f) dl[f] = &d[f][base];
            double* fx[4];
            for (int k4 = 0; k4 < 4; ++k4) fx[k4] = &flux[axes[k4]][base];
            for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
              const double w = wcell * node.weight * sig[std::abs(iv3 - iv3c)];
              KernelPoint kp;
              kp.r = grid.r(ir);
              kp.v3 = grid.v3(iv3);
              kp.r_p = grid.r(irc);
              kp.v3_p = grid.v3(iv3c);
              kp.z = node.z;
              const FluxRows rows = make_flux_rows(kp, branches, wc);
              const double* gs = &shifted[static_cast<std::size_t>(iv3c) * plane];
              const double* ds[5];
              for (int f = 0; f < 5; ++f)
                ds[f] = &shifted[(static_cast<std::size_t>(f + 1) * n_v3 + iv3c) * plane];
              for (std::size_t p = 0; p < plane; ++p) {
                const double gp = gs[p], gn = gl[p];
                const double l0 = dl[0][p], l1 = dl[1][p], l2 = dl[2][p], l3 = dl[3][p],
                             l4 = dl[4][p];
                const double m0 = ds[0][p], m1 = ds[1][p], m2 = ds[2][p], m3 = ds[3][p],
                             m4 = ds[4][p];
                for (int k4 = 0; k4 < 4; ++k4) {
                  const auto& gr = rows.gain[k4];
                  const auto& lr = rows.loss[k4];
                  const double gain = gr[0] * l0 + gr[1] * l1 + gr[2] * l2 + gr[3] * l3 +
                                      gr[4] * l4;
                  const double loss = lr[0] * m0 + lr[1] * m1 + lr[2] * m2 + lr[3] * m3 +
                                      lr[4] * m4;
                  fx[k4][p] += w * (gp * gain - gn * loss);
                }
              }
            }
          }
        }
      }
    }
  });
  return reduced_divergence(flux, grid);
}

std::vector<double> apply_qfpl_pair(const ReducedDensity& f, const ReducedDensity& h,
                                    const FplConfig& cfg) {
  if (f.grid.get() != h.grid.get() || f.values.size() != h.values.size())
    throw domain_error("apply_qfpl_pair: densities must share one grid");
  ReducedDensity sum = f;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += h.values[i];
  const std::vector<double> qs = apply_qfpl_avg(sum, cfg);
  const std::vector<double> qf = apply_qfpl_avg(f, cfg);
  const std::vector<double> qh = apply_qfpl_avg(h, cfg);
  std::vector<double> out(qs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (qs[i] - qf[i] - qh[i]);
  return out;
}

double fpl_weak_form(const ReducedDensity& g, const InvariantField& phi, const FplConfig& cfg) {
  check_config(cfg);
  const ReducedGrid& grid = *g.grid;
  const double wc = g.params.omega_c();
  const int n_r = grid.n_r;
  const int n_v3 = grid.n_v3;
  const std::size_t plane = grid.slice_size();
  const std::size_t n_nodes = grid.num_nodes();
  const RingPairTables tables =
      build_ring_pair_tables(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);

  const std::array<std::vector<double>, 5> dg = gradient_fields(g);
  const ReducedDensity phis = sample_field(g, phi);
  const std::array<std::vector<double>, 5> dp = gradient_fields(phis);

  // Static product fields read at the shifted collision partner:
  //   [0]       g
  //   [1..5]    dg_j
  //   [6..10]   g * dp_j
  //   [11..25]  sym_{j<=k} (dg_j dp_k + dg_k dp_j) / 2
  std::vector<std::vector<double>> fields(26, std::vector<double>(n_nodes));
  fields[0] = g.values;
  for (int j = 0; j < 5; ++j) {
    fields[1 + j] = dg[j];
    for (std::size_t i = 0; i < n_nodes; ++i) fields[6 + j][i] = g.values[i] * dp[j][i];
  }
  {
    int slot = 11;
    for (int j = 0; j < 5; ++j)
      for (int k = j; k < 5; ++k, ++slot)
        for (std::size_t i = 0; i < n_nodes; ++i)
          fields[slot][i] = 0.5 * (dg[j][i] * dp[k][i] + dg[k][i] * dp[j][i]);
  }
  // sym-slot lookup: pair (j, k) -> field index
  int sym[5][5];
  {
    int slot = 11;
    for (int j = 0; j < 5; ++j)
      for (int k = j; k < 5; ++k, ++slot) sym[j][k] = sym[k][j] = slot;
  }

  const std::size_t n_fibers = static_cast<std::size_t>(grid.n_x3) * n_r;
  std::vector<double> partial(n_fibers, 0.0);
  parallel_for(n_fibers, [&](std::size_t fb, std::size_t fe) {
    std::vector<double> shifted(26 * static_cast<std::size_t>(n_v3) * plane);
    std::vector<double> scratch(plane);
    for (std::size_t fiber = fb; fiber < fe; ++fiber) {
      const int ix3 = static_cast<int>(fiber / n_r);
      const int ir = static_cast<int>(fiber % n_r);
      double acc = 0.0;
      for (int irc = 0; irc < n_r; ++irc) {
        const double wcell = ring_cell_weight(grid, irc);
        const ChiQuadrature& quad = tables.quads[static_cast<std::size_t>(ir) * n_r + irc];
        for (int k = 0; k < tables.n_nodes; ++k) {
          const ChiNode& node = quad.nodes[static_cast<std::size_t>(k)];
          const auto branches = make_branches(node.z, node.l, grid.r(ir), grid.r(irc));
          const auto taps1 = shift_taps(grid.n_y1, grid.dy1(), node.z[0] / wc, cfg.interp);
          const auto taps2 = shift_taps(grid.n_y2, grid.dy2(), node.z[1] / wc, cfg.interp);
          for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
            const std::size_t src = grid.index(ix3, irc, iv3c, 0, 0);
            for (int f = 0; f < 26; ++f)
              apply_plane_shift(
                  &fields[static_cast<std::size_t>(f)][src],
                  &shifted[(static_cast<std::size_t>(f) * n_v3 + iv3c) * plane], grid.n_y1,
                  grid.n_y2, taps1, taps2, scratch);
          }
          const double* sig = tables.sigma_row(ir, irc, k, n_r, n_v3);
          for (int iv3 = 0; iv3 < n_v3; ++iv3) {
            const std::size_t base = grid.index(ix3, ir, iv3, 0, 0);
            const double* gl = &g.values[base];
            const double* dgl[5];
            const double* dpl[5];
            for (int f = 0; f < 5; ++f) {
              dgl[f] = &dg[f][base];
              dpl[f] = &dp[f][base];
            }
            for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
              const double w = wcell * node.weight * sig[std::abs(iv3 - iv3c)];
              KernelPoint kp;
              kp.r = grid.r(ir);
              kp.v3 = grid.v3(iv3);
              kp.r_p = grid.r(irc);
              kp.v3_p = grid.v3(iv3c);
              kp.z = node.z;
              const double* sh = &shifted[static_cast<std::size_t>(iv3c) * plane];
              const std::size_t fstride = static_cast<std::size_t>(n_v3) * plane;
              for (const Branch& f : branches) {
                const BranchKernels bk = make_branch_kernels(kp, f);
                for (int i = 0; i < 4; ++i) {
                  const std::array<double, 5> row = gradient_row(bk.xi[i], f.n, wc);
                  const std::array<double, 5> rowp = gradient_row(bk.xip[i], f.np, wc);
                  const double eps = xi_signs[i];
                  // per-point: [g' e - eps g c'] [ephi - eps bphi'] with one
                  // interpolation weight per product, split into four sums
                  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
                  for (std::size_t p = 0; p < plane; ++p) {
                    const double e = row[0] * dgl[0][p] + row[1] * dgl[1][p] +
                                     row[2] * dgl[2][p] + row[3] * dgl[3][p] +
                                     row[4] * dgl[4][p];
                    const double ephi = row[0] * dpl[0][p] + row[1] * dpl[1][p] +
                                        row[2] * dpl[2][p] + row[3] * dpl[3][p] +
                                        row[4] * dpl[4][p];
                    const double gshift = sh[p];
                    double bshift = 0.0, cshift = 0.0, dshift = 0.0;
                    for (int j = 0; j < 5; ++j) {
                      cshift += rowp[j] * sh[(1 + j) * fstride + p];
                      bshift += rowp[j] * sh[(6 + j) * fstride + p];
                    }
                    for (int j = 0; j < 5; ++j) {
                      dshift += rowp[j] * rowp[j] * sh[sym[j][j] * fstride + p];
                      for (int k2 = j + 1; k2 < 5; ++k2)
                        dshift += 2.0 * rowp[j] * rowp[k2] * sh[sym[j][k2] * fstride + p];
                    }
                    s1 += gshift * e * ephi;
                    s2 += bshift * e;
                    s3 += cshift * gl[p] * ephi;
                    s4 += dshift * gl[p];
                  }
                  acc += 0.5 * w * (s1 - eps * s2 - eps * s3 + s4);
                }
              }
            }
          }
        }
      }
      partial[fiber] = acc * grid.cell_volume(ir);
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return -0.5 * total;
}

double fpl_weak_vs_strong_check(const ReducedDensity& g, const InvariantField& phi,
                                const FplConfig& cfg) {
  const ReducedGrid& grid = *g.grid;
  const std::vector<double> rate = apply_qfpl_avg(g, cfg);
  const ReducedDensity phis = sample_field(g, phi);
  double inner = 0.0;
  for (std::size_t idx = 0; idx < rate.size(); ++idx) {
    int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
    grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
    inner += grid.cell_volume(ir) * rate[idx] * phis.values[idx];
  }
  return std::abs(inner - fpl_weak_form(g, phi, cfg));
}

double fpl_entropy_production(const ReducedDensity& g, const FplConfig& cfg) {
  check_config(cfg);
  const ReducedGrid& grid = *g.grid;
  const double wc = g.params.omega_c();
  const int n_r = grid.n_r;
  const int n_v3 = grid.n_v3;
  const std::size_t plane = grid.slice_size();
  const std::size_t n_nodes = grid.num_nodes();
  const RingPairTables tables =
      build_ring_pair_tables(grid, cfg.cross_section, cfg.n_phi, cfg.n_alpha);

  const std::array<std::vector<double>, 5> dg = gradient_fields(g);
  // Log-derivative fields: stencil gradient divided pointwise by the floored
  // density, so that g * dln_j recovers the plain gradient where g is
  // resolved.
  std::array<std::vector<double>, 5> dln;
  for (int j = 0; j < 5; ++j) {
    dln[j].resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
      dln[j][i] = dg[j][i] / std::max(g.values[i], cfg.positivity_floor);
  }

  // Static product fields at the shifted partner:
  //   [0] g, [1..5] g * dln_j, [6..20] sym g * dln_j * dln_k.
  // With nonnegative interpolation taps every (point, partner) term below is
  // g g' (bracket)^2 >= 0, so the result is non-positive by construction.
  std::vector<std::vector<double>> fields(21, std::vector<double>(n_nodes));
  fields[0] = g.values;
  for (int j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < n_nodes; ++i)
      fields[1 + j][i] = g.values[i] * dln[j][i];
  int sym[5][5];
  {
    int slot = 6;
    for (int j = 0; j < 5; ++j)
      for (int k = j; k < 5; ++k, ++slot) {
        sym[j][k] = sym[k][j] = slot;
        for (std::size_t i = 0; i < n_nodes; ++i)
          fields[slot][i] = g.values[i] * dln[j][i] * dln[k][i];
      }
  }

  const std::size_t n_fibers = static_cast<std::size_t>(grid.n_x3) * n_r;
  std::vector<double> partial(n_fibers, 0.0);
  parallel_for(n_fibers, [&](std::size_t fb, std::size_t fe) {
    std::vector<double> shifted(21 * static_cast<std::size_t>(n_v3) * plane);
    std::vector<double> scratch(plane);
    for (std::size_t fiber = fb; fiber < fe; ++fiber) {
      const int ix3 = static_cast<int>(fiber / n_r);
      const int ir = static_cast<int>(fiber % n_r);
      double acc = 0.0;
      for (int irc = 0; irc < n_r; ++irc) {
        const double wcell = ring_cell_weight(grid, irc);
        const ChiQuadrature& quad = tables.quads[static_cast<std::size_t>(ir) * n_r + irc];
        for (int k = 0; k < tables.n_nodes; ++k) {
          const ChiNode& node = quad.nodes[static_cast<std::size_t>(k)];
          const auto branches = make_branches(node.z, node.l, grid.r(ir), grid.r(irc));
          const auto taps1 = shift_taps(grid.n_y1, grid.dy1(), node.z[0] / wc, cfg.interp);
          const auto taps2 = shift_taps(grid.n_y2, grid.dy2(), node.z[1] / wc, cfg.interp);
          for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
            const std::size_t src = grid.index(ix3, irc, iv3c, 0, 0);
            for (int f = 0; f < 21; ++f)
              apply_plane_shift(
                  &fields[static_cast<std::size_t>(f)][src],
                  &shifted[(static_cast<std::size_t>(f) * n_v3 + iv3c) * plane], grid.n_y1,
                  grid.n_y2, taps1, taps2, scratch);
          }
          const double* sig = tables.sigma_row(ir, irc, k, n_r, n_v3);
          for (int iv3 = 0; iv3 < n_v3; ++iv3) {
            const std::size_t base = grid.index(ix3, ir, iv3, 0, 0);
            const double* gl = &g.values[base];
            const double* dll[5];
            for (int f = 0; f < 5; ++f) dll[f] = &dln[f][base];
            for (int iv3c = 0; iv3c < n_v3; ++iv3c) {
              const double w = wcell * node.weight * sig[std::abs(iv3 - iv3c)];
              KernelPoint kp;
              kp.r = grid.r(ir);
              kp.v3 = grid.v3(iv3);
              kp.r_p = grid.r(irc);
              kp.v3_p = grid.v3(iv3c);
              kp.z = node.z;
              const double* sh = &shifted[static_cast<std::size_t>(iv3c) * plane];
              const std::size_t fstride = static_cast<std::size_t>(n_v3) * plane;
              for (const Branch& f : branches) {
                const BranchKernels bk = make_branch_kernels(kp, f);
                for (int i = 0; i < 4; ++i) {
                  const std::array<double, 5> row = gradient_row(bk.xi[i], f.n, wc);
                  const std::array<double, 5> rowp = gradient_row(bk.xip[i], f.np, wc);
                  const double eps = xi_signs[i];
                  double s = 0.0;
                  for (std::size_t p = 0; p < plane; ++p) {
                    const double bg = row[0] * dll[0][p] + row[1] * dll[1][p] +
                                      row[2] * dll[2][p] + row[3] * dll[3][p] +
                                      row[4] * dll[4][p];
                    double bl = 0.0, bll = 0.0;
                    for (int j = 0; j < 5; ++j) bl += rowp[j] * sh[(1 + j) * fstride + p];
                    for (int j = 0; j < 5; ++j) {
                      bll += rowp[j] * rowp[j] * sh[sym[j][j] * fstride + p];
                      for (int k2 = j + 1; k2 < 5; ++k2)
                        bll += 2.0 * rowp[j] * rowp[k2] * sh[sym[j][k2] * fstride + p];
                    }
                    // g g' (bg - eps bl')^2 with one tap weight per product
                    s += gl[p] * (bg * bg * sh[p] - 2.0 * eps * bg * bl + bll);
                  }
                  acc += 0.5 * w * s;
                }
              }
            }
          }
        }
      }
      partial[fiber] = acc * grid.cell_volume(ir);
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return -0.5 * total;
}

FplInvariants fpl_conserved_functionals(const ReducedDensity& g) {
  const ReducedGrid& grid = *g.grid;
  const double wc = g.params.omega_c();
  FplInvariants out;
  for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
    int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
    grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
    const double w = grid.cell_volume(ir) * g.values[idx];
    const double r = grid.r(ir), v3 = grid.v3(iv3);
    const double y1 = grid.y1(iy1), y2 = grid.y2(iy2);
    out.mass += w;
    out.momentum_z += w * v3;
    out.energy += w * 0.5 * (r * r + v3 * v3);
    out.center_y1 += w * y1;
    out.center_y2 += w * y2;
    out.larmor_power += w * (y1 * y1 + y2 * y2 - r * r / (wc * wc));
  }
  return out;
}

}  // namespace gyrokin
