#pragma once

// Spherical flux integral -(1/2 pi) oint_S *_3 dh, evaluated as
// -(1/2 pi) int (grad h . n) dA with product quadrature: Gauss-Legendre in
// cos(theta), trapezoid in the periodic azimuth.

#include <vector>

#include "hktl/harmonic.hpp"

namespace hktl {

struct QuadratureSpec {
  int polar_nodes = 64;    // Gauss-Legendre in cos(theta)
  int azimuth_nodes = 128;  // uniform in phi
};

// Nodes and weights of n-point Gauss-Legendre on [-1, 1] (Newton iteration
// on the Legendre recurrence).
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<size_t>(i)] = -x;
    nodes[static_cast<size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[static_cast<size_t>(i)] = w;
    weights[static_cast<size_t>(n - 1 - i)] = w;
  }
}

inline double chern_flux(const HarmonicPotential& h, const std::array<double, 3>& center,
                         double radius, const QuadratureSpec& quad = {}) {
  if (radius <= 0.0) throw ConfigError("flux sphere radius must be positive");
  const double margin = 1e-3 * radius;
  for (size_t k = 0; k < h.sources().size(); ++k) {
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = h.sources()[k].center[static_cast<size_t>(i)] -
                       center[static_cast<size_t>(i)];
      d2 += d * d;
    }
    if (std::abs(std::sqrt(d2) - radius) < margin)
      throw QuadratureHazardError("source #" + std::to_string(k) +
                                  " lies within the quadrature margin of the flux sphere");
  }

  std::vector<double> u, w;
  gauss_legendre(quad.polar_nodes, u, w);
  const int m = quad.azimuth_nodes;
  double sum = 0.0;
  for (int i = 0; i < quad.polar_nodes; ++i) {
    const double cu = u[static_cast<size_t>(i)];
    const double su = std::sqrt(std::max(0.0, 1.0 - cu * cu));
    double ring = 0.0;
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * M_PI * j / m;
      const std::array<double, 3> n{su * std::cos(phi), su * std::sin(phi), cu};
      const std::array<double, 3> p{center[0] + radius * n[0], center[1] + radius * n[1],
                                    center[2] + radius * n[2]};
      const std::array<double, 3> g = h.gradient(p);
      ring += g[0] * n[0] + g[1] * n[1] + g[2] * n[2];
    }
    sum += w[static_cast<size_t>(i)] * ring;
  }
  // dA = R^2 du dphi; the azimuth weight is 2 pi / m.
  return -(radius * radius / m) * sum;
}

}  // namespace hktl
