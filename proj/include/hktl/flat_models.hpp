#pragma once

// Flat hyperKahler models H^n = R^{4n} with the weighted diagonal circle
// action q_k -> e^{i w_k theta} q_k.  Coordinates are grouped per quaternion
// as (q0, q1, q2, q3) = w + x i + y j + z k.  The complex structures are the
// right multiplications by -i, -j, -k, which commute with the action; signs
// are pinned by mu(1) = i/2 together with d(mu^A) = X into omega_A.

#include "hktl/quaternion.hpp"
#include "hktl/structure.hpp"
#include "hktl/sweep.hpp"

namespace hktl {

struct FlatModel {
  int n = 1;
  std::vector<int> weights;  // defaults to all ones

  std::vector<int> effective_weights() const {
    std::vector<int> w = weights;
    if (w.empty()) w.assign(static_cast<size_t>(n), 1);
    if (static_cast<int>(w.size()) != n)
      throw ConfigError("flat model weight count must equal n");
    bool nonzero = false;
    for (int wi : w) nonzero = nonzero || wi != 0;
    if (!nonzero) throw ConfigError("flat model needs at least one nonzero weight");
    return w;
  }
};

struct FlatDomain {
  double half_width = 1.5;   // sample box [-h, h]^{4n}
  double r_fixed = 0.25;     // exclusion around the fixed-point set, via |X|
};

namespace detail {

inline SmallMat flat_endo_matrix(int n, int which) {
  // per-block patterns (out, in, sign) for right multiplication by -i,-j,-k
  static const int pat[3][4][3] = {
      {{1, 0, -1}, {0, 1, 1}, {3, 2, 1}, {2, 3, -1}},
      {{2, 0, -1}, {3, 1, -1}, {0, 2, 1}, {1, 3, 1}},
      {{3, 0, -1}, {2, 1, 1}, {1, 2, -1}, {0, 3, 1}}};
  SmallMat m = SmallMat::zero(4 * n);
  for (int k = 0; k < n; ++k)
    for (int t = 0; t < 4; ++t)
      m(4 * k + pat[which][t][0], 4 * k + pat[which][t][1]) = pat[which][t][2];
  return m;
}

}  // namespace detail

inline StructureFields build_flat_structure(const FlatModel& model, const FlatDomain& domain = {}) {
  const std::vector<int> w = model.effective_weights();
  const int n = model.n;
  const Chart chart{4 * n, "flat" + std::to_string(n)};
  if (chart.dim > kMaxDim)
    throw ConfigError("flat model dimension exceeds the supported maximum (8)");

  StructureFields f;
  f.chart = chart;
  f.metric = MatrixField::identity(chart);

  auto q = [&](int k, int c) { return ScalarField::coordinate(chart, 4 * k + c); };

  // X(q) = (i w_k q_k)_k: block components (-w q1, w q0, -w q3, w q2).
  {
    std::vector<ScalarField> comps;
    for (int k = 0; k < n; ++k) {
      const double wk = w[static_cast<size_t>(k)];
      comps.push_back((-wk) * q(k, 1));
      comps.push_back(wk * q(k, 0));
      comps.push_back((-wk) * q(k, 3));
      comps.push_back(wk * q(k, 2));
    }
    f.killing = VectorField(chart, std::move(comps));
  }

  // Constant Kahler triple, per block:
  //   omega_I = -dq0^dq1 + dq2^dq3
  //   omega_J = -dq0^dq2 - dq1^dq3
  //   omega_K = -dq0^dq3 + dq1^dq2
  {
    auto block_form = [&](int a, int b, double s1, int c, int d, double s2) {
      std::vector<std::pair<MultiIndex, ScalarField>> comps;
      for (int k = 0; k < n; ++k) {
        comps.emplace_back(MultiIndex::of({4 * k + a, 4 * k + b}),
                           ScalarField::constant(chart, s1));
        comps.emplace_back(MultiIndex::of({4 * k + c, 4 * k + d}),
                           ScalarField::constant(chart, s2));
      }
      return DifferentialForm::from_components(chart, 2, std::move(comps));
    };
    f.kahler = {block_form(0, 1, -1.0, 2, 3, 1.0), block_form(0, 2, -1.0, 1, 3, -1.0),
                block_form(0, 3, -1.0, 1, 2, 1.0)};
  }

  f.complex_structures = {MatrixField::constant(chart, detail::flat_endo_matrix(n, 0)),
                          MatrixField::constant(chart, detail::flat_endo_matrix(n, 1)),
                          MatrixField::constant(chart, detail::flat_endo_matrix(n, 2))};

  f.killing_form = musical_flat(f.metric, f.killing);
  f.moment_forms = {interior_product(f.killing, f.kahler[0]),
                    interior_product(f.killing, f.kahler[1]),
                    interior_product(f.killing, f.kahler[2])};

  {
    ScalarField n2 = ScalarField::constant(chart, 0.0);
    for (int k = 0; k < n; ++k) {
      const double wk2 = static_cast<double>(w[static_cast<size_t>(k)]) * w[static_cast<size_t>(k)];
      ScalarField block = q(k, 0) * q(k, 0) + q(k, 1) * q(k, 1) + q(k, 2) * q(k, 2) +
                          q(k, 3) * q(k, 3);
      n2 = n2 + wk2 * block;
    }
    f.killing_norm_sq = n2;
  }

  // mu = sum_k w_k (1/2) conj(q_k) i q_k.
  {
    ScalarField muI = ScalarField::constant(chart, 0.0);
    ScalarField muJ = ScalarField::constant(chart, 0.0);
    ScalarField muK = ScalarField::constant(chart, 0.0);
    for (int k = 0; k < n; ++k) {
      const double wk = w[static_cast<size_t>(k)];
      muI = muI + (0.5 * wk) * (q(k, 0) * q(k, 0) + q(k, 1) * q(k, 1) - q(k, 2) * q(k, 2) -
                                q(k, 3) * q(k, 3));
      muJ = muJ + wk * (q(k, 1) * q(k, 2) - q(k, 0) * q(k, 3));
      muK = muK + wk * (q(k, 1) * q(k, 3) + q(k, 0) * q(k, 2));
    }
    f.moment_map = {muI, muJ, muK};
  }

  {
    std::vector<DifferentialForm> quartet{f.killing_form, f.moment_forms[0], f.moment_forms[1],
                                          f.moment_forms[2]};
    f.quaternionic_metric = sym_square_sum(chart, quartet);
  }

  {
    Hodge3Frame hf;
    const ScalarField inv_n2 = inverse(f.killing_norm_sq);
    hf.alpha = f.moment_forms;
    for (int A = 0; A < 3; ++A) {
      const VectorField ax = f.complex_structures[static_cast<size_t>(A)].apply(f.killing);
      std::vector<ScalarField> comps;
      for (int i = 0; i < chart.dim; ++i) comps.push_back(ax.component(i) * inv_n2);
      hf.dual[static_cast<size_t>(A)] = VectorField(chart, std::move(comps));
    }
    f.hodge_frame = std::move(hf);
  }

  f.sample_box.assign(static_cast<size_t>(chart.dim), {-domain.half_width, domain.half_width});
  const ScalarField n2 = f.killing_norm_sq;
  const double r2 = domain.r_fixed * domain.r_fixed;
  f.admissible = [n2, r2](const ChartPoint& p) { return n2.value(p) > r2; };
  return f;
}

inline Quaternion quaternion_at(const ChartPoint& p, int block) {
  return Quaternion{p[4 * block + 0], p[4 * block + 1], p[4 * block + 2], p[4 * block + 3]};
}

struct FlatPointData {
  SmallMat metric;
  std::array<SmallMat, 3> kahler;
  SmallVec killing;
  double killing_norm_sq = 0.0;
  std::array<double, 3> moment{};
};

inline FlatPointData flat_structure_at(const StructureFields& f, const ChartPoint& p) {
  FlatPointData d;
  d.metric = f.metric.values(p);
  for (int A = 0; A < 3; ++A)
    d.kahler[static_cast<size_t>(A)] = two_form_matrix(f.kahler[static_cast<size_t>(A)], p);
  d.killing = f.killing.values(p);
  d.killing_norm_sq = f.killing_norm_sq.value(p);
  d.moment = f.moment_at(p);
  if (d.killing_norm_sq < 1e-24)
    throw FixedPointError("flat structure data requested at a fixed point of the action",
                          p.coords_vec());
  return d;
}

// Distribution of 2 |mu - shift| - |X|^2 over a seeded sample; the key
// feasibility quantity for inverting a modification.
inline ResidualReport check_norm_moment(const StructureFields& f, const SampleSpec& spec,
                                        const std::array<double, 3>& shift = {0, 0, 0}) {
  const auto pts = sample_points(f.chart, f.sample_box, spec, f.admissible);
  double minv = std::numeric_limits<double>::infinity();
  double maxv = -std::numeric_limits<double>::infinity();
  double sum = 0.0, max_abs = 0.0;
  std::vector<double> argmin;
  for (const auto& p : pts) {
    const auto mu = f.moment_at(p);
    const double d0 = mu[0] - shift[0], d1 = mu[1] - shift[1], d2 = mu[2] - shift[2];
    const double v = 2.0 * std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) - f.killing_norm_sq.value(p);
    if (v < minv) {
      minv = v;
      argmin = p.coords_vec();
    }
    maxv = std::max(maxv, v);
    sum += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  ResidualReport report;
  report.seed = spec.seed;
  ResidualCheck c;
  c.name = "norm_moment_gap";
  c.anchor = "2|mu| - |X|^2";
  c.tolerance = 0.0;
  c.max = max_abs;
  c.mean = sum / static_cast<double>(pts.size());
  c.count = static_cast<long>(pts.size());
  c.pass = true;  // informational: the distribution itself
  c.details["min"] = minv;
  c.details["max_signed"] = maxv;
  for (size_t i = 0; i < argmin.size(); ++i) c.details["argmin_" + std::to_string(i)] = argmin[i];
  report.checks.push_back(std::move(c));
  return report;
}

}  // namespace hktl
