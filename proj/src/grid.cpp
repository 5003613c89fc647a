#include "gyrokin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gyrokin/errors.hpp"
#include "gyrokin/threading.hpp"

namespace gyrokin {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

enum class AxisKind { Periodic, Radial, Bounded };

struct AxisInfo {
  AxisKind kind;
  int n;
  double h;
};

AxisInfo axis_info(const ReducedGrid& g, AxisId axis) {
  switch (axis) {
    case AxisId::Y1:
      return {AxisKind::Periodic, g.n_y1, g.dy1()};
    case AxisId::Y2:
      return {AxisKind::Periodic, g.n_y2, g.dy2()};
    case AxisId::X3:
      return {AxisKind::Periodic, g.n_x3, g.dx3()};
    case AxisId::R:
      return {AxisKind::Radial, g.n_r, g.dr()};
    case AxisId::V3:
      return {AxisKind::Bounded, g.n_v3, g.dv3()};
  }
  throw domain_error("axis_info: unknown axis id");
}

// Flat-array stride of one step along the axis.
std::size_t axis_stride(const ReducedGrid& g, AxisId axis) {
  const std::size_t sy2 = 1;
  const std::size_t sy1 = sy2 * g.n_y2;
  const std::size_t sv3 = sy1 * g.n_y1;
  const std::size_t sr = sv3 * g.n_v3;
  const std::size_t sx3 = sr * g.n_r;
  switch (axis) {
    case AxisId::Y1:
      return sy1;
    case AxisId::Y2:
      return sy2;
    case AxisId::X3:
      return sx3;
    case AxisId::R:
      return sr;
    case AxisId::V3:
      return sv3;
  }
  throw domain_error("axis_stride: unknown axis id");
}

// Row i of the second-order first-derivative stencil on one axis.
std::vector<std::pair<int, double>> axis_row(const AxisInfo& ax, int i) {
  const double c = 1.0 / (2.0 * ax.h);
  const int n = ax.n;
  if (ax.kind == AxisKind::Periodic) {
    if (n < 2) return {};
    return {{(i + n - 1) % n, -c}, {(i + 1) % n, c}};
  }
  if (ax.kind == AxisKind::Radial && i == 0) {
    // Even reflection across r = 0: the ghost value equals g at the first node.
    return {{0, -c}, {1, c}};
  }
  if (i == 0) return {{0, -3.0 * c}, {1, 4.0 * c}, {2, -c}};
  if (i == n - 1) return {{n - 1, 3.0 * c}, {n - 2, -4.0 * c}, {n - 3, c}};
  return {{i - 1, -c}, {i + 1, c}};
}

double axis_weight(const ReducedGrid& g, AxisId axis, int i) {
  return axis == AxisId::R ? g.r(i) : 1.0;
}

// out[line] += scale * (stencil in)[line] applied along one axis, threaded
// over lines with fixed ownership so the result does not depend on the
// thread count.
void apply_axis_add(const std::vector<double>& in, std::vector<double>& out, const Stencil1D& st,
                    int n, std::size_t stride, double scale) {
  const std::size_t total = in.size();
  const std::size_t n_lines = total / static_cast<std::size_t>(n);
  const double* pin = in.data();
  double* pout = out.data();
  parallel_for(n_lines, [&](std::size_t lb, std::size_t le) {
    for (std::size_t lid = lb; lid < le; ++lid) {
      const std::size_t block = lid / stride;
      const std::size_t off = lid % stride;
      const std::size_t base = block * (static_cast<std::size_t>(n) * stride) + off;
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& [col, coef] : st.rows[i]) {
          acc += coef * pin[base + static_cast<std::size_t>(col) * stride];
        }
        pout[base + static_cast<std::size_t>(i) * stride] += scale * acc;
      }
    }
  });
}

}  // namespace

void validate_grid(const ReducedGrid& g) {
  if (g.n_y1 < 1) throw config_error("grid.n_y1: must be at least 1");
  if (g.n_y2 < 1) throw config_error("grid.n_y2: must be at least 1");
  if (g.n_x3 < 1) throw config_error("grid.n_x3: must be at least 1");
  if (g.n_r < 3) throw config_error("grid.n_r: must be at least 3");
  if (g.n_v3 < 3) throw config_error("grid.n_v3: must be at least 3");
  if (!(g.L > 0.0)) throw config_error("grid.L: must be positive");
  if (!(g.L3 > 0.0)) throw config_error("grid.L3: must be positive");
  if (!(g.R_max > 0.0)) throw config_error("grid.R_max: must be positive");
  if (!(g.V3 > 0.0)) throw config_error("grid.V3: must be positive");
}

ReducedDensity make_density(std::shared_ptr<const ReducedGrid> grid, const PlasmaParams& params) {
  if (!grid) throw config_error("density.grid: missing grid");
  validate_grid(*grid);
  validate_params(params);
  ReducedDensity out;
  out.grid = std::move(grid);
  out.params = params;
  out.values.assign(out.grid->num_nodes(), 0.0);
  return out;
}

Stencil1D axis_stencil(const ReducedGrid& g, AxisId axis) {
  const AxisInfo ax = axis_info(g, axis);
  Stencil1D st;
  st.rows.resize(ax.n);
  for (int i = 0; i < ax.n; ++i) st.rows[i] = axis_row(ax, i);
  return st;
}

Stencil1D axis_stencil_adjoint(const ReducedGrid& g, AxisId axis) {
  const AxisInfo ax = axis_info(g, axis);
  Stencil1D adj;
  adj.rows.resize(ax.n);
  for (int j = 0; j < ax.n; ++j) {
    const double wj = axis_weight(g, axis, j);
    for (const auto& [col, coef] : axis_row(ax, j)) {
      adj.rows[col].emplace_back(j, coef * wj / axis_weight(g, axis, col));
    }
  }
  return adj;
}

std::array<double, 5> invariant_gradient(const ReducedDensity& g, std::size_t idx) {
  const ReducedGrid& gr = *g.grid;
  int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
  gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
  const int pos[5] = {iy1, iy2, ix3, ir, iv3};
  std::array<double, 5> out{};
  for (int k = 0; k < 5; ++k) {
    const AxisId axis = static_cast<AxisId>(k);
    const AxisInfo ax = axis_info(gr, axis);
    double acc = 0.0;
    for (const auto& [col, coef] : axis_row(ax, pos[k])) {
      int jx3 = ix3, jr = ir, jv3 = iv3, jy1 = iy1, jy2 = iy2;
      switch (axis) {
        case AxisId::Y1:
          jy1 = col;
          break;
        case AxisId::Y2:
          jy2 = col;
          break;
        case AxisId::X3:
          jx3 = col;
          break;
        case AxisId::R:
          jr = col;
          break;
        case AxisId::V3:
          jv3 = col;
          break;
      }
      acc += coef * g.values[gr.index(jx3, jr, jv3, jy1, jy2)];
    }
    out[k] = acc;
  }
  return out;
}

std::array<std::vector<double>, 5> gradient_fields(const ReducedDensity& g) {
  const ReducedGrid& gr = *g.grid;
  std::array<std::vector<double>, 5> out;
  for (int k = 0; k < 5; ++k) {
    const AxisId axis = static_cast<AxisId>(k);
    out[k].assign(gr.num_nodes(), 0.0);
    const Stencil1D st = axis_stencil(gr, axis);
    apply_axis_add(g.values, out[k], st, axis_info(gr, axis).n, axis_stride(gr, axis), 1.0);
  }
  return out;
}

Vec6 full_gradient(const ReducedDensity& g, std::size_t idx, double alpha,
                   const PlasmaParams& params) {
  const std::array<double, 5> d = invariant_gradient(g, idx);
  const double wc = params.omega_c();
  Vec6 out{};
  out[0] = d[0] / wc;
  out[1] = d[1] / wc;
  out[2] = d[2] / wc;
  out[3] = -d[1] / wc + d[3] * std::cos(alpha);
  out[4] = d[0] / wc + d[3] * std::sin(alpha);
  out[5] = d[4];
  return out;
}

std::vector<double> reduced_divergence(const std::array<std::vector<double>, 5>& flux,
                                       const ReducedGrid& grid) {
  std::vector<double> out(grid.num_nodes(), 0.0);
  for (int k = 0; k < 5; ++k) {
    const AxisId axis = static_cast<AxisId>(k);
    if (flux[k].size() != grid.num_nodes()) {
      throw domain_error("reduced_divergence: flux component has wrong size");
    }
    const Stencil1D adj = axis_stencil_adjoint(grid, axis);
    apply_axis_add(flux[k], out, adj, axis_info(grid, axis).n, axis_stride(grid, axis), -1.0);
  }
  return out;
}

ReducedDensity project_initial(const ScalarField& f_full,
                               std::shared_ptr<const ReducedGrid> grid,
                               const PlasmaParams& params, const GyroQuadratureConfig& cfg) {
  ReducedDensity out = make_density(std::move(grid), params);
  const ReducedGrid& gr = *out.grid;
  const double wc = params.omega_c();
  parallel_for(out.values.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      int ix3 = 0, ir = 0, iv3 = 0, iy1 = 0, iy2 = 0;
      gr.decompose(idx, ix3, ir, iv3, iy1, iy2);
      InvariantCoords inv;
      inv.y = {gr.y1(iy1), gr.y2(iy2)};
      inv.x3 = gr.x3(ix3);
      inv.r = gr.r(ir);
      inv.v3 = gr.v3(iv3);
      const PhasePoint p = from_invariants(inv, Gyrophase{0.0}, wc);
      out.values[idx] = gyroaverage_scalar(f_full, p, params, cfg);
    }
  });
  return out;
}

std::vector<std::pair<int, double>> shift_taps(int n, double h, double shift,
                                               InterpScheme scheme) {
  if (n < 1) throw domain_error("shift_taps: n must be positive");
  if (!(h > 0.0)) throw domain_error("shift_taps: h must be positive");
  if (scheme == InterpScheme::Bilinear) {
    const double q = -shift / h;  // sample sits q cells ahead of the node
    const double base = std::floor(q);
    double frac = q - base;
    if (frac < 0.0) frac = 0.0;
    if (frac > 1.0) frac = 1.0;
    const long lb = static_cast<long>(base);
    const int i0 = static_cast<int>(((lb % n) + n) % n);
    const int i1 = (i0 + 1) % n;
    return {{i0, 1.0 - frac}, {i1, frac}};
  }
  if (n % 2 != 0) throw domain_error("shift_taps: spectral interpolation requires even n");
  const double length = n * h;
  std::vector<std::pair<int, double>> taps(n);
  double sum = 0.0;
  for (int d = 0; d < n; ++d) {
    // Periodic trigonometric cardinal D with D(k h) = delta_k0 for even n.
    const double t = -shift - d * h;
    const double tw = t - length * std::round(t / length);
    const double u = kPi * tw / length;
    double w = 1.0;
    if (std::abs(u) >= 1e-14) w = std::sin(n * u) / (n * std::tan(u));
    taps[d] = {d, w};
    sum += w;
  }
  // The cardinal basis is a partition of unity; renormalize the rounding
  // residue so constants interpolate exactly.
  for (auto& t : taps) t.second /= sum;
  return taps;
}

void apply_plane_shift(const double* src, double* dst, int n1, int n2,
                       const std::vector<std::pair<int, double>>& taps1,
                       const std::vector<std::pair<int, double>>& taps2,
                       std::vector<double>& scratch) {
  scratch.assign(static_cast<std::size_t>(n1) * n2, 0.0);
  for (const auto& [o, w] : taps1) {
    for (int i = 0; i < n1; ++i) {
      const double* srow = src + static_cast<std::size_t>(((i + o) % n1 + n1) % n1) * n2;
      double* trow = scratch.data() + static_cast<std::size_t>(i) * n2;
      for (int j = 0; j < n2; ++j) trow[j] += w * srow[j];
    }
  }
  for (int i = 0; i < n1; ++i) {
    const double* srow = scratch.data() + static_cast<std::size_t>(i) * n2;
    double* drow = dst + static_cast<std::size_t>(i) * n2;
    std::fill(drow, drow + n2, 0.0);
    for (const auto& [o, w] : taps2) {
      for (int j = 0; j < n2; ++j) drow[j] += w * srow[((j + o) % n2 + n2) % n2];
    }
  }
}

namespace {

// Shared reduction over nodes: accumulates fn(node data) * cell volume.
template <typename Fn>
double grid_integral(const ReducedDensity& g, Fn&& fn) {
  const ReducedGrid& gr = *g.grid;
  double total = 0.0;
  for (int ix3 = 0; ix3 < gr.n_x3; ++ix3) {
    for (int ir = 0; ir < gr.n_r; ++ir) {
      const double vol = gr.cell_volume(ir);
      double slab = 0.0;
      for (int iv3 = 0; iv3 < gr.n_v3; ++iv3) {
        for (int iy1 = 0; iy1 < gr.n_y1; ++iy1) {
          for (int iy2 = 0; iy2 < gr.n_y2; ++iy2) {
            slab += fn(g.values[gr.index(ix3, ir, iv3, iy1, iy2)], gr.r(ir), gr.v3(iv3),
                       gr.y1(iy1), gr.y2(iy2));
          }
        }
      }
      total += vol * slab;
    }
  }
  return total;
}

}  // namespace

double mass_functional(const ReducedDensity& g) {
  return grid_integral(g, [](double v, double, double, double, double) { return v; });
}

double momentum_z_functional(const ReducedDensity& g) {
  const double m = g.params.m;
  return grid_integral(g,
                       [m](double v, double, double v3, double, double) { return m * v * v3; });
}

double kinetic_energy_functional(const ReducedDensity& g) {
  const double m = g.params.m;
  return grid_integral(g, [m](double v, double r, double v3, double, double) {
    return 0.5 * m * v * (r * r + v3 * v3);
  });
}

Vec2 larmor_center_functional(const ReducedDensity& g) {
  const double c1 =
      grid_integral(g, [](double v, double, double, double y1, double) { return v * y1; });
  const double c2 =
      grid_integral(g, [](double v, double, double, double, double y2) { return v * y2; });
  return {c1, c2};
}

double larmor_power_functional(const ReducedDensity& g) {
  const double wc = g.params.omega_c();
  return grid_integral(g, [wc](double v, double r, double, double y1, double y2) {
    return v * (y1 * y1 + y2 * y2 - r * r / (wc * wc));
  });
}

double entropy_functional(const ReducedDensity& g) {
  double gmax = 0.0;
  for (double v : g.values) gmax = std::max(gmax, v);
  const double floor_val = 1e-300 * gmax;
  return grid_integral(g, [floor_val](double v, double, double, double, double) {
    if (!(v > floor_val)) return 0.0;
    return v * std::log(v);
  });
}

double l2_maxwellian_distance(const ReducedDensity& g) {
  const ReducedDensity maxw = maxwellian_density(g.grid, g.params, 1.0);
  const double mass_m = mass_functional(maxw);
  const double c = mass_functional(g) / mass_m;
  const ReducedGrid& gr = *g.grid;
  double total = 0.0;
  for (int ix3 = 0; ix3 < gr.n_x3; ++ix3) {
    for (int ir = 0; ir < gr.n_r; ++ir) {
      const double vol = gr.cell_volume(ir);
      for (int iv3 = 0; iv3 < gr.n_v3; ++iv3) {
        const double mv = maxwellian_rv(gr.r(ir), gr.v3(iv3), g.params);
        for (int iy1 = 0; iy1 < gr.n_y1; ++iy1) {
          for (int iy2 = 0; iy2 < gr.n_y2; ++iy2) {
            const double d = g.values[gr.index(ix3, ir, iv3, iy1, iy2)] - c * mv;
            total += vol * d * d / mv;
          }
        }
      }
    }
  }
  return std::sqrt(total);
}

ReducedDensity maxwellian_density(std::shared_ptr<const ReducedGrid> grid,
                                  const PlasmaParams& params, double scale) {
  ReducedDensity out = make_density(std::move(grid), params);
  const ReducedGrid& gr = *out.grid;
  for (int ix3 = 0; ix3 < gr.n_x3; ++ix3) {
    for (int ir = 0; ir < gr.n_r; ++ir) {
      for (int iv3 = 0; iv3 < gr.n_v3; ++iv3) {
        const double mv = scale * maxwellian_rv(gr.r(ir), gr.v3(iv3), params);
        for (int iy1 = 0; iy1 < gr.n_y1; ++iy1) {
          for (int iy2 = 0; iy2 < gr.n_y2; ++iy2) {
            out.values[gr.index(ix3, ir, iv3, iy1, iy2)] = mv;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace gyrokin
