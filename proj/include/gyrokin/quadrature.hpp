#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gyrokin {

struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
inline Quadrature1D gauss_legendre(std::size_t n) {
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Recurrence for P_n(x) and P_n'(x).
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

// Gauss-Legendre rule mapped to [a, b].
inline Quadrature1D gauss_legendre(std::size_t n, double a, double b) {
  Quadrature1D q = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

// Uniform phase nodes 2*pi*j/n with equal weights 2*pi/n; spectrally accurate
// for smooth periodic integrands.
inline Quadrature1D periodic_trapezoid(std::size_t n) {
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.assign(n, 2.0 * std::acos(-1.0) / static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    q.nodes[j] = 2.0 * std::acos(-1.0) * static_cast<double>(j) / static_cast<double>(n);
  return q;
}

}  // namespace gyrokin
