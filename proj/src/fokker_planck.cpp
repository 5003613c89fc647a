#include "gyrokin/fokker_planck.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "gyrokin/threading.hpp"

namespace gyrokin {

namespace {

// h = g/M with M evaluated analytically per (r, v3) ring.
ReducedDensity maxwellian_ratio(const ReducedDensity& g) {
  const ReducedGrid& grid = *g.grid;
  ReducedDensity h = g;
  for (int ix3 = 0; ix3 < grid.n_x3; ++ix3) {
    for (int ir = 0; ir < grid.n_r; ++ir) {
      for (int iv3 = 0; iv3 < grid.n_v3; ++iv3) {
        const double m = maxwellian_rv(grid.r(ir), grid.v3(iv3), g.params);
        double* row = &h.values[grid.index(ix3, ir, iv3, 0, 0)];
        for (std::size_t p = 0; p < grid.slice_size(); ++p) row[p] /= m;
      }
    }
  }
  return h;
}

}  // namespace

Mat6 l_matrix() {
  Mat6 l{};
  l[0] = {2.0, 0.0, 0.0, 0.0, -1.0, 0.0};
  l[1] = {0.0, 2.0, 0.0, 1.0, 0.0, 0.0};
  l[2] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  l[3] = {0.0, 1.0, 0.0, 1.0, 0.0, 0.0};
  l[4] = {-1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  l[5] = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  return l;
}

std::vector<double> apply_qfp_avg(const ReducedDensity& g) {
  const ReducedGrid& grid = *g.grid;
  const ReducedDensity h = maxwellian_ratio(g);
  const std::array<std::vector<double>, 5> d = gradient_fields(h);
  const double wc = g.params.omega_c();
  const double pref = g.params.theta / (g.params.m * g.params.tau);
  const double pref_y = pref / (wc * wc);

  std::array<std::vector<double>, 5> flux;
  for (auto& f : flux) f.assign(grid.num_nodes(), 0.0);
  parallel_for(grid.num_nodes(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
      grid.decompose(idx, ix3, ir, iv3, iy1, iy2);
      const double m = maxwellian_rv(grid.r(ir), grid.v3(iv3), g.params);
      flux[0][idx] = pref_y * m * d[0][idx];
      flux[1][idx] = pref_y * m * d[1][idx];
      flux[3][idx] = pref * m * d[3][idx];
      flux[4][idx] = pref * m * d[4][idx];
    }
  });
  return reduced_divergence(flux, grid);
}

double fp_dissipation(const ReducedDensity& g) {
  const ReducedGrid& grid = *g.grid;
  const ReducedDensity h = maxwellian_ratio(g);
  const std::array<std::vector<double>, 5> d = gradient_fields(h);
  const double wc = g.params.omega_c();
  const double pref = g.params.theta / (g.params.m * g.params.tau);
  double total = 0.0;
  for (int ix3 = 0; ix3 < grid.n_x3; ++ix3) {
    for (int ir = 0; ir < grid.n_r; ++ir) {
      const double vol = grid.cell_volume(ir);
      for (int iv3 = 0; iv3 < grid.n_v3; ++iv3) {
        const double m = maxwellian_rv(grid.r(ir), grid.v3(iv3), g.params);
        double s = 0.0;
        for (int iy1 = 0; iy1 < grid.n_y1; ++iy1) {
          for (int iy2 = 0; iy2 < grid.n_y2; ++iy2) {
            const std::size_t idx = grid.index(ix3, ir, iv3, iy1, iy2);
            s += (d[0][idx] * d[0][idx] + d[1][idx] * d[1][idx]) / (wc * wc) +
                 d[3][idx] * d[3][idx] + d[4][idx] * d[4][idx];
          }
        }
        total += vol * m * s;
      }
    }
  }
  return -pref * total;
}

}  // namespace gyrokin
