#pragma once

// Shared test utilities.  The differentiation and wedge oracles here are
// deliberately independent of the library's evaluation plans: they work from
// coefficient values alone, so they can cross-check the analytic paths.

#include <cmath>
#include <vector>

#include "hktl/forms.hpp"
#include "hktl/sampling.hpp"

namespace testutil {

using namespace hktl;

inline ChartPoint random_point(const Chart& chart, Rng& rng, double lo = -1.5, double hi = 1.5) {
  SmallVec x = SmallVec::zero(chart.dim);
  for (int i = 0; i < chart.dim; ++i) x[i] = rng.uniform(lo, hi);
  return ChartPoint(chart, x);
}

// Random polynomial scalar field of total degree <= maxdeg, built from
// coordinate fields so it carries exact jets.
inline ScalarField random_polynomial(const Chart& chart, Rng& rng, int maxdeg = 3) {
  ScalarField f = ScalarField::constant(chart, rng.uniform(-1.0, 1.0));
  const int terms = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
  for (int t = 0; t < terms; ++t) {
    ScalarField mono = ScalarField::constant(chart, rng.uniform(-1.0, 1.0));
    const int deg = 1 + static_cast<int>(rng.uniform(0.0, static_cast<double>(maxdeg)));
    for (int d = 0; d < deg; ++d) {
      const int c = static_cast<int>(rng.uniform(0.0, static_cast<double>(chart.dim)));
      mono = mono * ScalarField::coordinate(chart, c);
    }
    f = f + mono;
  }
  return f;
}

inline DifferentialForm random_form(const Chart& chart, int degree, Rng& rng, int maxdeg = 3) {
  std::vector<std::pair<MultiIndex, ScalarField>> comps;
  std::vector<int> stack;
  std::function<void(int, int)> rec = [&](int next, int remaining) {
    if (remaining == 0) {
      MultiIndex mi;
      for (int i : stack) mi.idx[mi.len++] = static_cast<std::uint8_t>(i);
      comps.emplace_back(mi, random_polynomial(chart, rng, maxdeg));
      return;
    }
    for (int i = next; i <= chart.dim - remaining; ++i) {
      stack.push_back(i);
      rec(i + 1, remaining - 1);
      stack.pop_back();
    }
  };
  rec(0, degree);
  return DifferentialForm::from_components(chart, degree, std::move(comps));
}

inline std::vector<int> to_vec(const MultiIndex& m) {
  std::vector<int> v;
  for (int k = 0; k < m.size(); ++k) v.push_back(m[k]);
  return v;
}

// Brute-force wedge coefficient: (a ^ b)_I = sum over splittings of I into a
// p-subset S and its complement, with the shuffle sign, of a_S * b_{I\S}.
inline double wedge_oracle_coeff(const DifferentialForm& a, const DifferentialForm& b,
                                 const ChartPoint& p, const std::vector<int>& index) {
  const int deg_a = a.degree();
  const int n = static_cast<int>(index.size());
  double sum = 0.0;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(pick.size()) == deg_a) {
      std::vector<int> sub, rest;
      int sign_inversions = 0;
      for (int k = 0; k < n; ++k) {
        bool in_pick = false;
        for (int q : pick)
          if (q == k) in_pick = true;
        if (in_pick) {
          sub.push_back(index[static_cast<size_t>(k)]);
          sign_inversions += static_cast<int>(rest.size());
        } else {
          rest.push_back(index[static_cast<size_t>(k)]);
        }
      }
      const double sgn = (sign_inversions % 2 == 0) ? 1.0 : -1.0;
      sum += sgn * a.coefficient(p, sub) * b.coefficient(p, rest);
      return;
    }
    for (int k = next; k < n; ++k) {
      pick.push_back(k);
      rec(k + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return sum;
}

// Central-difference exterior derivative, straight from the definition
// (d a)_J = sum_k (-1)^k d/dx_{J_k} a_{J minus J_k}; independent of the
// library's evaluation plans and of its analytic gradients.
inline double ext_d_fd_coeff(const DifferentialForm& a, const ChartPoint& p,
                             const std::vector<int>& index) {
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  double sum = 0.0;
  for (size_t k = 0; k < index.size(); ++k) {
    std::vector<int> rest;
    for (size_t m = 0; m < index.size(); ++m)
      if (m != k) rest.push_back(index[m]);
    const int j = index[k];
    const double h = cbrt_eps * std::max(1.0, std::abs(p[j]));
    SmallVec xp = p.x, xm = p.x;
    xp[j] += h;
    xm[j] -= h;
    const double dplus = a.coefficient(ChartPoint(p.chart, xp), rest);
    const double dminus = a.coefficient(ChartPoint(p.chart, xm), rest);
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sgn * (dplus - dminus) / (2.0 * h);
  }
  return sum;
}

// Enumerates all increasing multi-indices of the given length.
inline std::vector<std::vector<int>> all_indices(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(cur.size()) == degree) {
      out.push_back(cur);
      return;
    }
    for (int i = next; i <= dim - (degree - static_cast<int>(cur.size())); ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

inline double max_form_diff(const DifferentialForm& a, const DifferentialForm& b,
                            const ChartPoint& p) {
  double m = 0.0;
  for (const auto& idx : all_indices(a.dim(), a.degree()))
    m = std::max(m, std::abs(a.coefficient(p, idx) - b.coefficient(p, idx)));
  return m;
}

}  // namespace testutil
