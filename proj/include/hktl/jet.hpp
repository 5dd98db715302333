#pragma once

// Second-order jets (value, gradient, Hessian) over a small number of
// coordinates, with exact propagation through arithmetic.  All field
// evaluation in the library bottoms out here, so analytic first and second
// derivatives are available wherever the defining expressions are smooth.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hktl {

inline constexpr int kMaxDim = 8;

struct Jet {
  int dim = 0;
  int order = 0;  // 0: value, 1: +gradient, 2: +Hessian
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim * kMaxDim> h{};

  double& hess(int i, int j) { return h[static_cast<size_t>(i) * kMaxDim + j]; }
  double hess(int i, int j) const { return h[static_cast<size_t>(i) * kMaxDim + j]; }

  static Jet constant(int dim, int order, double value) {
    Jet j;
    j.dim = dim;
    j.order = order;
    j.v = value;
    return j;
  }

  static Jet coordinate(int dim, int order, int index, double value) {
    Jet j = constant(dim, order, value);
    if (order >= 1) j.g[static_cast<size_t>(index)] = 1.0;
    return j;
  }
};

namespace detail {
inline void check_pair(const Jet& a, const Jet& b) {
  if (a.dim != b.dim) throw std::logic_error("jet dimension mismatch");
}
}  // namespace detail

inline Jet operator+(const Jet& a, const Jet& b) {
  detail::check_pair(a, b);
  Jet r = a;
  r.order = std::min(a.order, b.order);
  r.v += b.v;
  if (r.order >= 1)
    for (int i = 0; i < r.dim; ++i) r.g[i] = a.g[i] + b.g[i];
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j) r.hess(i, j) = a.hess(i, j) + b.hess(i, j);
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  detail::check_pair(a, b);
  Jet r = a;
  r.order = std::min(a.order, b.order);
  r.v -= b.v;
  if (r.order >= 1)
    for (int i = 0; i < r.dim; ++i) r.g[i] = a.g[i] - b.g[i];
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j) r.hess(i, j) = a.hess(i, j) - b.hess(i, j);
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  r.v = -r.v;
  for (int i = 0; i < r.dim; ++i) r.g[i] = -r.g[i];
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j) r.hess(i, j) = -r.hess(i, j);
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  detail::check_pair(a, b);
  Jet r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.v = a.v * b.v;
  if (r.order >= 1)
    for (int i = 0; i < r.dim; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j)
        r.hess(i, j) = a.hess(i, j) * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.hess(i, j);
  return r;
}

inline Jet operator*(double s, const Jet& a) {
  Jet r = a;
  r.v *= s;
  for (int i = 0; i < r.dim; ++i) r.g[i] *= s;
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j) r.hess(i, j) *= s;
  return r;
}

inline Jet operator*(const Jet& a, double s) { return s * a; }

// q = a/b, rearranged from a = q*b so no third derivatives appear.
inline Jet operator/(const Jet& a, const Jet& b) {
  detail::check_pair(a, b);
  Jet r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.v = a.v / b.v;
  if (r.order >= 1)
    for (int i = 0; i < r.dim; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j)
        r.hess(i, j) =
            (a.hess(i, j) - r.v * b.hess(i, j) - r.g[i] * b.g[j] - r.g[j] * b.g[i]) / b.v;
  return r;
}

// Composition with a smooth scalar function given by f, f', f'' at u.v.
inline Jet jet_chain(const Jet& u, double f0, double f1, double f2) {
  Jet r;
  r.dim = u.dim;
  r.order = u.order;
  r.v = f0;
  if (r.order >= 1)
    for (int i = 0; i < r.dim; ++i) r.g[i] = f1 * u.g[i];
  if (r.order >= 2)
    for (int i = 0; i < r.dim; ++i)
      for (int j = 0; j < r.dim; ++j) r.hess(i, j) = f2 * u.g[i] * u.g[j] + f1 * u.hess(i, j);
  return r;
}

inline Jet jet_sqrt(const Jet& u) {
  const double s = std::sqrt(u.v);
  return jet_chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}

inline Jet jet_inv(const Jet& u) {
  const double iv = 1.0 / u.v;
  return jet_chain(u, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet jet_pow_int(const Jet& u, int n) {
  if (n == 0) return Jet::constant(u.dim, u.order, 1.0);
  if (n == 1) return u;
  const double f0 = std::pow(u.v, n);
  const double f1 = n * std::pow(u.v, n - 1);
  const double f2 = double(n) * (n - 1) * std::pow(u.v, n - 2);
  return jet_chain(u, f0, f1, f2);
}

}  // namespace hktl
