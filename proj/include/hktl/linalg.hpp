#pragma once

// Dense helpers for the small (dim <= 8) matrices that show up pointwise:
// symmetric eigenvalues via cyclic Jacobi, linear solves via partial-pivot
// elimination, determinants, singular values.  No external dependency.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hktl/jet.hpp"

namespace hktl {

struct SmallVec {
  int n = 0;
  std::array<double, kMaxDim> a{};

  double& operator[](int i) { return a[static_cast<size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<size_t>(i)]; }

  static SmallVec zero(int n) {
    SmallVec v;
    v.n = n;
    return v;
  }
};

struct SmallMat {
  int n = 0;  // rows == cols for everything we need
  std::array<double, kMaxDim * kMaxDim> a{};

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * kMaxDim + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * kMaxDim + j]; }

  static SmallMat zero(int n) {
    SmallMat m;
    m.n = n;
    return m;
  }
  static SmallMat identity(int n) {
    SmallMat m = zero(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline double dot(const SmallVec& x, const SmallVec& y) {
  double s = 0.0;
  for (int i = 0; i < x.n; ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const SmallVec& x) { return std::sqrt(dot(x, x)); }

inline SmallVec matvec(const SmallMat& m, const SmallVec& x) {
  SmallVec r = SmallVec::zero(m.n);
  for (int i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.n; ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

inline SmallMat matmul(const SmallMat& a, const SmallMat& b) {
  SmallMat r = SmallMat::zero(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < a.n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

inline SmallMat transpose(const SmallMat& m) {
  SmallMat r = SmallMat::zero(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r(i, j) = m(j, i);
  return r;
}

inline double max_abs(const SmallMat& m) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

// Eigenvalues of a symmetric matrix, ascending.  Cyclic Jacobi; the inputs
// here are tiny and well scaled, a fixed sweep budget is plenty.
inline SmallVec sym_eigenvalues(SmallMat m) {
  const int n = m.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  SmallVec ev = SmallVec::zero(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.a.begin(), ev.a.begin() + n);
  return ev;
}

// Singular values of a (possibly antisymmetric) matrix, descending.
inline SmallVec singular_values(const SmallMat& m) {
  SmallMat mtm = matmul(transpose(m), m);
  SmallVec ev = sym_eigenvalues(mtm);
  SmallVec sv = SmallVec::zero(m.n);
  for (int i = 0; i < m.n; ++i) sv[i] = std::sqrt(std::max(0.0, ev[m.n - 1 - i]));
  return sv;
}

// Solves m x = b by Gaussian elimination with partial pivoting.
inline SmallVec solve(SmallMat m, SmallVec b) {
  const int n = m.n;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < 1e-300) throw std::runtime_error("singular linear system");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      std::swap(b[col], b[piv]);
    }
    const double inv = 1.0 / m(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) * inv;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      b[r] -= f * b[col];
    }
  }
  SmallVec x = SmallVec::zero(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= m(r, j) * x[j];
    x[r] = s / m(r, r);
  }
  return x;
}

inline double determinant(SmallMat m) {
  const int n = m.n;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (m(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      det = -det;
    }
    det *= m(col, col);
    const double inv = 1.0 / m(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) * inv;
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
    }
  }
  return det;
}

}  // namespace hktl
