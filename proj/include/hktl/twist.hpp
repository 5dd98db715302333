#pragma once

// Elementary quaternionic deformations g~ = g + h g_HX and the twist data
// that makes their twist hyperKahler:
//   a = lambda (1 + h |X|^2),   F = lambda ( d(h alpha_0) + *_3 dh ),
// together with the transferred differential d_W = d - (1/a) F ^ (X . ),
// the inversion rules, and the feasibility scan for inverting a
// modification.  The deformation function h is always a potential on R^3
// composed with the structure's moment map.

#include "hktl/harmonic.hpp"
#include "hktl/structure.hpp"
#include "hktl/sweep.hpp"

namespace hktl {

struct TwistData {
  double lambda = 1.0;
  ScalarField a;               // transversality function, da = -X into F
  DifferentialForm curvature;  // F
  VectorField killing;         // X
  double eps_a = 1e-4;         // |a| below this is treated as the zero locus
  bool is_modification = false;
};

inline ScalarField deformation_field(const StructureFields& s, const HarmonicPotential& h) {
  return h.compose_with(s.moment_map);
}

// dh pulled back through the moment map, expanded on the frame 1-forms, and
// its star *_3 dh = h_I a_J^a_K + h_J a_K^a_I + h_K a_I^a_J.
inline DifferentialForm moment_dh(const StructureFields& s, const HarmonicPotential& h) {
  const ScalarField hf = deformation_field(s, h);
  return ext_d(hf);
}

inline DifferentialForm moment_star_dh(const StructureFields& s, const HarmonicPotential& h) {
  std::array<ScalarField, 3> comp;
  for (int A = 0; A < 3; ++A)
    comp[static_cast<size_t>(A)] =
        pullback(h.as_field().derivative(A), {s.moment_map[0], s.moment_map[1], s.moment_map[2]});
  return comp[0] * wedge(s.moment_forms[1], s.moment_forms[2]) +
         comp[1] * wedge(s.moment_forms[2], s.moment_forms[0]) +
         comp[2] * wedge(s.moment_forms[0], s.moment_forms[1]);
}

// Guarded 1/a: evaluation near the zero locus raises instead of amplifying.
inline ScalarField guarded_inverse(const ScalarField& a, double eps_a) {
  return ScalarField::from_jet(a.chart(), a.analytic_order(),
                               [a, eps_a](const ChartPoint& p, int order) {
                                 const Jet j = a.eval(p, order);
                                 if (std::abs(j.v) <= eps_a)
                                   throw ZeroLocusError(
                                       "twist function a vanishes within tolerance " +
                                           std::to_string(eps_a),
                                       p.coords_vec());
                                 return jet_inv(j);
                               });
}

inline SmallMat deform_metric(const StructureFields& s, const HarmonicPotential& h,
                              const ChartPoint& p, double eps_a = 1e-4) {
  if (s.admissible && !s.admissible(p))
    throw ExclusionError("point lies in a domain exclusion zone", p.coords_vec());
  const auto mu = s.moment_at(p);
  const double hv = h.value(mu);
  const double n2 = s.killing_norm_sq.value(p);
  if (std::abs(1.0 + hv * n2) <= eps_a)
    throw DegenerateMetricError("deformed metric is degenerate: 1 + h |X|^2 = " +
                                    std::to_string(1.0 + hv * n2),
                                p.coords_vec());
  SmallMat g = s.metric.values(p);
  const SmallMat q = s.quaternionic_metric.values(p);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) g(i, j) += hv * q(i, j);
  return g;
}

// Deformed Kahler forms omega~_A = omega_A + h (alpha_0 ^ alpha_A + alpha_B ^ alpha_C).
inline std::array<DifferentialForm, 3> deformed_kahler(const StructureFields& s,
                                                       const HarmonicPotential& h) {
  const ScalarField hf = deformation_field(s, h);
  std::array<DifferentialForm, 3> out;
  for (int A = 0; A < 3; ++A) {
    const int B = (A + 1) % 3, C = (A + 2) % 3;
    out[static_cast<size_t>(A)] =
        s.kahler[static_cast<size_t>(A)] +
        hf * (wedge(s.killing_form, s.moment_forms[static_cast<size_t>(A)]) +
              wedge(s.moment_forms[static_cast<size_t>(B)],
                    s.moment_forms[static_cast<size_t>(C)]));
  }
  return out;
}

inline TwistData build_hk_twist_data(const StructureFields& s, const HarmonicPotential& h,
                                     double lambda, double eps_a = 1e-4,
                                     bool enforce_harmonic = true) {
  if (lambda == 0.0) throw ConfigError("twist scale lambda must be nonzero");
  if (enforce_harmonic && !h.is_harmonic())
    throw HarmonicityError("deformation function is not harmonic: |Laplacian| = " +
                           std::to_string(h.symbolic_laplacian_norm()));
  TwistData td;
  td.lambda = lambda;
  td.killing = s.killing;
  td.eps_a = eps_a;
  const ScalarField hf = deformation_field(s, h);
  td.a = lambda * (1.0 + hf * s.killing_norm_sq);
  td.curvature = lambda * (ext_d(hf * s.killing_form) + moment_star_dh(s, h));
  return td;
}

// d_W = d - (1/a) F ^ (X into .); on functions the correction vanishes.
inline DifferentialForm twist_d(const DifferentialForm& form, const TwistData& td) {
  const DifferentialForm d = ext_d(form);
  if (form.degree() == 0) return d;
  const ScalarField inv_a = guarded_inverse(td.a, td.eps_a);
  return d - inv_a * wedge(td.curvature, interior_product(td.killing, form));
}

inline DifferentialForm twist_d(const ScalarField& f, const TwistData& td) {
  (void)td;
  return ext_d(f);
}

// Admissibility for twist sweeps: the structure's own exclusions, a margin
// around the sources of h in moment space, and the zero locus of a.
inline std::function<bool(const ChartPoint&)> twist_admissible(
    const StructureFields& s, const HarmonicPotential& h, const TwistData& td,
    double moment_excl = 0.1) {
  auto base = s.admissible;
  auto moment_map = s.moment_map;
  auto sources = h.sources();
  auto a = td.a;
  const double eps_a = td.eps_a;
  return [=](const ChartPoint& p) {
    if (base && !base(p)) return false;
    const std::array<double, 3> mu{moment_map[0].value(p), moment_map[1].value(p),
                                   moment_map[2].value(p)};
    for (const auto& src : sources) {
      const double dx = mu[0] - src.center[0], dy = mu[1] - src.center[1],
                   dz = mu[2] - src.center[2];
      if (dx * dx + dy * dy + dz * dz < moment_excl * moment_excl) return false;
    }
    return std::abs(a.value(p)) > eps_a;
  };
}

// Residuals of the hyperKahler twist conditions over a seeded sample: the
// transferred closedness d_W(omega~_A) = 0 together with dF = 0.  For a
// pull-back deformation function the first three vanish identically with the
// constructed data, so the obstruction to a genuine twist lives entirely in
// the curvature residual dF = lambda (Laplacian h) alpha_IJK.  The signature
// of the deformed metric is recorded alongside.
inline ResidualReport verify_twist_hyperkahler(const StructureFields& s,
                                               const HarmonicPotential& h, double lambda,
                                               const SampleSpec& spec) {
  TwistData td = build_hk_twist_data(s, h, lambda, spec.eps_a, /*enforce_harmonic=*/false);
  const auto omega = deformed_kahler(s, h);
  const auto pts = sample_points(s.chart, s.sample_box, spec, twist_admissible(s, h, td));

  std::vector<CheckDef> checks;
  const char* names[3] = {"twist_closedness_I", "twist_closedness_J", "twist_closedness_K"};
  for (int A = 0; A < 3; ++A) {
    DifferentialForm r = twist_d(omega[static_cast<size_t>(A)], td);
    checks.push_back({names[A], "d_W(omega~_A) = 0", 1e-6,
                      [r](const ChartPoint& p) { return r.sup_norm(p); }});
  }
  {
    DifferentialForm df = ext_d(td.curvature);
    checks.push_back({"curvature_closed", "dF = 0", 1e-6,
                      [df](const ChartPoint& p) { return df.sup_norm(p); }});
  }
  // Per-sample signature of g~: the count of negative eigenvalues.  Both
  // definite and pseudo-definite deformations are admitted, so the check is
  // informational (its tolerance is the chart dimension).
  {
    auto metric = s.metric;
    auto quaternionic = s.quaternionic_metric;
    auto moment = s.moment_map;
    checks.push_back(
        {"deformed_metric_signature", "negative eigenvalues of g~ per sample",
         static_cast<double>(s.chart.dim), [metric, quaternionic, moment, h](const ChartPoint& p) {
           SmallMat g = metric.values(p);
           const SmallMat q = quaternionic.values(p);
           const double hv =
               h.value({moment[0].value(p), moment[1].value(p), moment[2].value(p)});
           for (int i = 0; i < g.n; ++i)
             for (int j = 0; j < g.n; ++j) g(i, j) += hv * q(i, j);
           const SmallVec ev = sym_eigenvalues(g);
           int neg = 0;
           for (int i = 0; i < g.n; ++i)
             if (ev[i] < 0.0) ++neg;
           return static_cast<double>(neg);
         }});
  }
  ResidualReport report = run_residual_sweep(pts, checks, spec.seed);
  report.tolerances["pde"] = 1e-6;
  return report;
}

// g~(X, X) / a^2 = |X|^2 / (lambda^2 (1 + h |X|^2)); on a Gibbons-Hawking
// structure with h = V_N this is 1 / (V + V_N).
inline double twisted_killing_norm(const StructureFields& s, const HarmonicPotential& h,
                                   double lambda, const ChartPoint& p, double eps_a = 1e-4) {
  const double n2 = s.killing_norm_sq.value(p);
  const double hv = h.value(s.moment_at(p));
  const double denom = 1.0 + hv * n2;
  if (std::abs(lambda * denom) <= eps_a)
    throw ZeroLocusError("twist function a vanishes within tolerance", p.coords_vec());
  return n2 / (lambda * lambda * denom);
}

// Twist inversion, expressed through fields on the original chart:
//   lambda' = 1/lambda,  a' = 1/a,  F' = (1/a) F,  h' = -lambda^2 h,
// and |X'|^2 = |X|^2 / (lambda a).
struct InverseTwistData {
  double lambda_check = 1.0;
  ScalarField h_check;              // -lambda^2 h, composed with the moment map
  ScalarField a_check;              // 1/a
  DifferentialForm curvature_check;  // (1/a) F
  ScalarField killing_norm_sq_check;
  ScalarField h_check_rederived;  // (a'/lambda' - 1) / |X'|^2
};

inline InverseTwistData invert_twist_data(const StructureFields& s, const HarmonicPotential& h,
                                          double lambda, double eps_a = 1e-4) {
  const TwistData td = build_hk_twist_data(s, h, lambda, eps_a);
  InverseTwistData out;
  out.lambda_check = 1.0 / lambda;
  out.h_check = (-lambda * lambda) * deformation_field(s, h);
  const ScalarField inv_a = guarded_inverse(td.a, eps_a);
  out.a_check = inv_a;
  out.curvature_check = inv_a * td.curvature;
  out.killing_norm_sq_check = (1.0 / lambda) * (s.killing_norm_sq * inv_a);
  out.h_check_rederived =
      (out.a_check * (1.0 / out.lambda_check) - 1.0) * inverse(out.killing_norm_sq_check);
  return out;
}

inline TwistData modification_data(const StructureFields& s, const HarmonicPotential& v_n,
                                   double eps_a = 1e-4) {
  TwistData td = build_hk_twist_data(s, v_n, -1.0, eps_a);
  td.is_modification = true;
  return td;
}

inline constexpr double kFeasibilityMargin = 1e-9;

// Scan of 2 |mu - p0| - |X|^2; inverting a modification centred at p0 needs
// this strictly positive.
inline ResidualReport inverse_modification_feasible(const StructureFields& s,
                                                    const std::array<double, 3>& p0,
                                                    const SampleSpec& spec) {
  const auto pts = sample_points(s.chart, s.sample_box, spec, s.admissible);
  double minv = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::vector<double> argmin;
  for (const auto& p : pts) {
    const auto mu = s.moment_at(p);
    const double d0 = mu[0] - p0[0], d1 = mu[1] - p0[1], d2 = mu[2] - p0[2];
    const double v = 2.0 * std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) - s.killing_norm_sq.value(p);
    if (v < minv) {
      minv = v;
      argmin = p.coords_vec();
    }
    sum += v;
  }
  ResidualReport report;
  report.seed = spec.seed;
  ResidualCheck c;
  c.name = "inverse_modification_feasible";
  c.anchor = "|X|^2 < 2 |mu - p0|";
  c.tolerance = 0.0;
  c.max = minv;  // the governing statistic is the minimum gap
  c.mean = sum / static_cast<double>(pts.size());
  c.count = static_cast<long>(pts.size());
  c.pass = minv > kFeasibilityMargin;
  c.details["min_gap"] = minv;
  for (size_t i = 0; i < argmin.size(); ++i) c.details["argmin_" + std::to_string(i)] = argmin[i];
  report.checks.push_back(std::move(c));
  return report;
}

// The compatibility and closedness invariants of constructed twist data.
inline ResidualReport verify_twist_data(const StructureFields& s, const TwistData& td,
                                        const HarmonicPotential& h, const SampleSpec& spec) {
  const auto pts = sample_points(s.chart, s.sample_box, spec, twist_admissible(s, h, td));
  const DifferentialForm da = ext_d(td.a);
  const DifferentialForm xf = interior_product(td.killing, td.curvature);
  const DifferentialForm compat = da + xf;
  const DifferentialForm df = ext_d(td.curvature);
  const DifferentialForm invar = ext_d(xf);
  std::vector<CheckDef> checks{
      {"twist_compatibility", "da = -X into F", 1e-8,
       [compat](const ChartPoint& p) { return compat.sup_norm(p); }},
      {"curvature_closed", "dF = 0", 1e-6,
       [df](const ChartPoint& p) { return df.sup_norm(p); }},
      {"curvature_invariant", "d(X into F) = 0", 1e-8,
       [invar](const ChartPoint& p) { return invar.sup_norm(p); }}};
  return run_residual_sweep(pts, checks, spec.seed);
}

}  // namespace hktl
