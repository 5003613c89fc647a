#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gyrokin/grid.hpp"
#include "gyrokin/kernels.hpp"
#include "gyrokin/physics.hpp"

namespace gyrokin::detail {

// Per-apply tables shared by the averaged collision operators: one
// ChiQuadrature per (r, r') ring pair and the cross section evaluated at
// every (pair, offset node, |v3 - v3'|) triple.
struct RingPairTables {
  std::vector<ChiQuadrature> quads;  // ir * n_r + irc
  std::vector<double> sigma;         // ((ir * n_r + irc) * n_nodes + k) * n_v3 + |dm|
  int n_nodes = 0;

  const double* sigma_row(int ir, int irc, int k, int n_r, int n_v3) const {
    const std::size_t pair = static_cast<std::size_t>(ir) * n_r + irc;
    return &sigma[(pair * n_nodes + k) * n_v3];
  }
};

inline RingPairTables build_ring_pair_tables(const ReducedGrid& grid, const CrossSection& cs,
                                             int n_phi, int n_alpha) {
  RingPairTables t;
  const int n_r = grid.n_r;
  const int n_v3 = grid.n_v3;
  t.n_nodes = n_phi * n_alpha;
  t.quads.reserve(static_cast<std::size_t>(n_r) * n_r);
  t.sigma.assign(static_cast<std::size_t>(n_r) * n_r * t.n_nodes * n_v3, 0.0);
  const double dv3 = grid.dv3();
  for (int ir = 0; ir < n_r; ++ir) {
    for (int irc = 0; irc < n_r; ++irc) {
      ChiQuadrature q = chi_quadrature(grid.r(ir), grid.r(irc), n_phi, n_alpha);
      const std::size_t pair = static_cast<std::size_t>(ir) * n_r + irc;
      for (int k = 0; k < t.n_nodes; ++k) {
        const double l = q.nodes[static_cast<std::size_t>(k)].l;
        for (int dm = 0; dm < n_v3; ++dm) {
          const double dv = dm * dv3;
          t.sigma[(pair * t.n_nodes + k) * n_v3 + dm] = sigma_eval(std::sqrt(l * l + dv * dv), cs);
        }
      }
      t.quads.push_back(std::move(q));
    }
  }
  return t;
}

// Source-cell measure 2 pi r' dr' dv3' carried by one (r', v3') ring.
inline double ring_cell_weight(const ReducedGrid& grid, int irc) {
  return 2.0 * 3.1415926535897932384626433832795 * grid.r(irc) * grid.dr() * grid.dv3();
}

inline std::vector<double> maxwellian_table(const ReducedGrid& grid, const PlasmaParams& params) {
  std::vector<double> m(static_cast<std::size_t>(grid.n_r) * grid.n_v3);
  for (int ir = 0; ir < grid.n_r; ++ir)
    for (int iv3 = 0; iv3 < grid.n_v3; ++iv3)
      m[static_cast<std::size_t>(ir) * grid.n_v3 + iv3] =
          maxwellian_rv(grid.r(ir), grid.v3(iv3), params);
  return m;
}

}  // namespace gyrokin::detail
