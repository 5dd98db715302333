#pragma once

// The 4-dimensional hyperKahler structure of a positive harmonic potential:
//   g = (1/V)(dt + omega)^2 + V (dx^2 + dy^2 + dz^2),  d(omega) = -*_3 dV.
// Chart coordinates are (t, x, y, z); the moment map is (x, y, z) and the
// circle symmetry is d/dt.  Orientation is fixed by the volume form
// (dt + omega) ^ dx ^ dy ^ dz, which makes the flux of a sigma = +1 source
// equal to +1.

#include "hktl/monopole.hpp"
#include "hktl/structure.hpp"
#include "hktl/sweep.hpp"

namespace hktl {

struct GHDomain {
  std::array<std::array<double, 2>, 3> box{{{-2, 2}, {-2, 2}, {-2, 2}}};
  double r_excl = 1e-2;  // balls around source centers
  double r_axis = 1e-2;  // cylinders around Dirac strings
};

struct ValidationOptions {
  bool enabled = true;
  int positivity_samples = 10000;
  int monopole_samples = 1000;
  double monopole_tol = 1e-6;
  std::uint64_t seed = 12345;
};

struct GHStructure {
  HarmonicPotential potential;
  Patch patch = Patch::North;
  GHDomain domain;
  ScalarField potential_r3;    // V on the (x,y,z) chart
  DifferentialForm gauge_r3;   // omega on the (x,y,z) chart
  StructureFields fields;
};

namespace detail {

inline DifferentialForm gh_basis_one_form(const Chart& chart, int i) {
  MultiIndex mi;
  mi.idx[mi.len++] = static_cast<std::uint8_t>(i);
  return DifferentialForm::from_components(chart, 1,
                                           {{mi, ScalarField::constant(chart, 1.0)}});
}

inline bool gh_admissible(const GHDomain& domain, const std::vector<PointSource>& sources,
                          Patch patch, double x, double y, double z) {
  for (int a = 0; a < 3; ++a) {
    const double c = (a == 0 ? x : (a == 1 ? y : z));
    if (c < domain.box[static_cast<size_t>(a)][0] || c > domain.box[static_cast<size_t>(a)][1])
      return false;
  }
  for (const auto& s : sources) {
    const double dx = x - s.center[0], dy = y - s.center[1], dz = z - s.center[2];
    if (dx * dx + dy * dy + dz * dz < domain.r_excl * domain.r_excl) return false;
    const double rho = std::hypot(dx, dy);
    const bool string_side =
        (patch == Patch::North) ? (dz <= domain.r_axis) : (dz >= -domain.r_axis);
    if (rho < domain.r_axis && string_side) return false;
  }
  return true;
}

inline GHStructure gh_assemble(const HarmonicPotential& V, const DifferentialForm& gauge_r3,
                               Patch patch, const GHDomain& domain) {
  GHStructure s;
  s.potential = V;
  s.patch = patch;
  s.domain = domain;
  s.potential_r3 = V.as_field();
  s.gauge_r3 = gauge_r3;

  const Chart chart{4, "gh"};
  StructureFields& f = s.fields;
  f.chart = chart;

  const std::vector<int> xyz{1, 2, 3};
  const ScalarField v = V.field_on(chart, xyz);
  const ScalarField inv_v = inverse(v);
  const DifferentialForm omega = lift_form(chart, gauge_r3, xyz);
  const DifferentialForm dt = gh_basis_one_form(chart, 0);
  const DifferentialForm dx = gh_basis_one_form(chart, 1);
  const DifferentialForm dy = gh_basis_one_form(chart, 2);
  const DifferentialForm dz = gh_basis_one_form(chart, 3);
  const DifferentialForm theta0 = dt + omega;

  // Gauge coefficients as scalar fields (omega has no dt component).
  std::array<ScalarField, 4> w{ScalarField::constant(chart, 0.0),
                               ScalarField::constant(chart, 0.0),
                               ScalarField::constant(chart, 0.0),
                               ScalarField::constant(chart, 0.0)};
  for (size_t slot = 0; slot < omega.indices().size(); ++slot) {
    const int i = omega.indices()[slot][0];
    w[static_cast<size_t>(i)] = ScalarField::from_jet(
        chart, 2, [omega, slot](const ChartPoint& p, int order) {
          return omega.eval(p, order).c[slot];
        });
  }

  // Metric: g_tt = 1/V, g_ta = w_a/V, g_ab = V delta_ab + w_a w_b / V.
  {
    std::vector<ScalarField> e;
    e.reserve(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == 0 && j == 0) {
          e.push_back(inv_v);
        } else if (i == 0) {
          e.push_back(w[static_cast<size_t>(j)] * inv_v);
        } else if (j == 0) {
          e.push_back(w[static_cast<size_t>(i)] * inv_v);
        } else if (i == j) {
          e.push_back(v + w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] * inv_v);
        } else {
          e.push_back(w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] * inv_v);
        }
      }
    f.metric = MatrixField(chart, std::move(e));
  }

  f.killing = VectorField::coordinate_basis(chart, 0);
  f.killing_form = inv_v * theta0;
  f.killing_norm_sq = inv_v;
  f.moment_forms = {dx, dy, dz};
  f.moment_map = {ScalarField::coordinate(chart, 1), ScalarField::coordinate(chart, 2),
                  ScalarField::coordinate(chart, 3)};

  f.kahler = {wedge(theta0, dx) + v * wedge(dy, dz),
              wedge(theta0, dy) + v * wedge(dz, dx),
              wedge(theta0, dz) + v * wedge(dx, dy)};

  // quaternionic span metric g_HX = g / V
  {
    std::vector<ScalarField> e;
    e.reserve(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e.push_back(f.metric.entry(i, j) * inv_v);
    f.quaternionic_metric = MatrixField(chart, std::move(e));
  }

  // Orthonormal frame e_0 = sqrt(V) d/dt, e_a = (d/dx_a - w_a d/dt)/sqrt(V)
  // and its coframe; the complex structures send e_0 -> e_1, e_2 -> e_3 for I
  // and cyclically for J, K.
  {
    const ScalarField sv = sqrt(v);
    const ScalarField isv = inverse(sv);
    const ScalarField zero = ScalarField::constant(chart, 0.0);
    std::array<std::array<ScalarField, 4>, 4> fv;  // frame vectors, fv[k][mu]
    std::array<std::array<ScalarField, 4>, 4> fc;  // coframe,       fc[k][nu]
    fv[0] = {sv, zero, zero, zero};
    for (int a = 1; a <= 3; ++a) {
      fv[static_cast<size_t>(a)] = {-w[static_cast<size_t>(a)] * isv, zero, zero, zero};
      fv[static_cast<size_t>(a)][static_cast<size_t>(a)] = isv;
    }
    fc[0] = {isv, w[1] * isv, w[2] * isv, w[3] * isv};
    for (int a = 1; a <= 3; ++a) {
      fc[static_cast<size_t>(a)] = {zero, zero, zero, zero};
      fc[static_cast<size_t>(a)][static_cast<size_t>(a)] = sv;
    }

    struct Pair {
      int out, in;
      double sign;
    };
    auto build_endo = [&](const std::array<Pair, 4>& pairs) {
      std::vector<ScalarField> e;
      e.reserve(16);
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          ScalarField s0 = ScalarField::constant(chart, 0.0);
          for (const auto& pr : pairs)
            s0 = s0 + pr.sign * (fv[static_cast<size_t>(pr.out)][static_cast<size_t>(mu)] *
                                 fc[static_cast<size_t>(pr.in)][static_cast<size_t>(nu)]);
          e.push_back(std::move(s0));
        }
      return MatrixField(chart, std::move(e));
    };
    f.complex_structures = {
        build_endo({Pair{1, 0, 1}, Pair{0, 1, -1}, Pair{3, 2, 1}, Pair{2, 3, -1}}),
        build_endo({Pair{2, 0, 1}, Pair{0, 2, -1}, Pair{1, 3, 1}, Pair{3, 1, -1}}),
        build_endo({Pair{3, 0, 1}, Pair{0, 3, -1}, Pair{2, 1, 1}, Pair{1, 2, -1}})};
  }

  // Hodge frame on span{dx, dy, dz}: duals are the horizontal lifts.
  {
    Hodge3Frame hf;
    hf.alpha = {dx, dy, dz};
    for (int a = 0; a < 3; ++a) {
      std::vector<ScalarField> comps{-w[static_cast<size_t>(a + 1)],
                                     ScalarField::constant(chart, 0.0),
                                     ScalarField::constant(chart, 0.0),
                                     ScalarField::constant(chart, 0.0)};
      comps[static_cast<size_t>(a + 1)] = ScalarField::constant(chart, 1.0);
      hf.dual[static_cast<size_t>(a)] = VectorField(chart, std::move(comps));
    }
    f.hodge_frame = std::move(hf);
  }

  f.sample_box = {{0.0, 2.0 * M_PI},
                  domain.box[0],
                  domain.box[1],
                  domain.box[2]};
  const auto sources = V.sources();
  const GHDomain dom = domain;
  const Patch pt = patch;
  f.admissible = [dom, sources, pt](const ChartPoint& p) {
    return detail::gh_admissible(dom, sources, pt, p[1], p[2], p[3]);
  };
  return s;
}

}  // namespace detail

inline GHStructure build_gh_structure(const HarmonicPotential& V, Patch patch,
                                      const GHDomain& domain = {},
                                      const ValidationOptions& opts = {}) {
  GHStructure s = detail::gh_assemble(V, potential_one_form(V, patch), patch, domain);
  if (!opts.enabled) return s;

  Box box3{domain.box[0], domain.box[1], domain.box[2]};
  const auto& sources = V.sources();
  auto admissible3 = [&](const ChartPoint& p) {
    return detail::gh_admissible(domain, sources, patch, p[0], p[1], p[2]);
  };

  {
    SampleSpec spec;
    spec.seed = opts.seed;
    spec.count = opts.positivity_samples;
    const auto pts = sample_points(r3_chart(), box3, spec, admissible3);
    double vmin = std::numeric_limits<double>::infinity();
    ChartPoint worst = pts.front();
    for (const auto& p : pts) {
      const double v = s.potential_r3.value(p);
      if (v < vmin) {
        vmin = v;
        worst = p;
      }
    }
    if (vmin <= 0.0)
      throw PositivityError("potential is not positive on the domain (min " +
                                std::to_string(vmin) + ")",
                            worst.coords_vec());
  }
  {
    SampleSpec spec;
    spec.seed = opts.seed + 1;
    spec.count = opts.monopole_samples;
    const auto pts = sample_points(r3_chart(), box3, spec, admissible3);
    const DifferentialForm residual =
        ext_d(s.gauge_r3) + hodge3(ext_d(s.potential_r3), Hodge3Frame::euclidean(r3_chart()));
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, residual.sup_norm(p));
    if (worst > opts.monopole_tol)
      throw GaugeError("monopole residual " + std::to_string(worst) + " exceeds tolerance " +
                       std::to_string(opts.monopole_tol));
  }
  return s;
}

// Assembles a structure around an explicit gauge form, skipping validation.
// Intended for planted-defect experiments.
inline GHStructure build_gh_structure_with_gauge(const HarmonicPotential& V,
                                                 const DifferentialForm& gauge_r3, Patch patch,
                                                 const GHDomain& domain = {}) {
  return detail::gh_assemble(V, gauge_r3, patch, domain);
}

inline void require_admissible(const StructureFields& f, const ChartPoint& p) {
  if (f.admissible && !f.admissible(p))
    throw ExclusionError("point lies in a domain exclusion zone", p.coords_vec());
}

inline SmallMat metric_at(const GHStructure& s, const ChartPoint& p) {
  require_admissible(s.fields, p);
  return s.fields.metric.values(p);
}

inline std::array<SmallMat, 3> hk_triple_at(const GHStructure& s, const ChartPoint& p) {
  require_admissible(s.fields, p);
  return {two_form_matrix(s.fields.kahler[0], p), two_form_matrix(s.fields.kahler[1], p),
          two_form_matrix(s.fields.kahler[2], p)};
}

inline KillingData killing_data(const GHStructure& s) { return s.fields.killing_data(); }

struct FrameAtPoint {
  std::array<SmallVec, 4> vectors;  // orthonormal frame e_0..e_3
  SmallMat I, J, K;
};

inline FrameAtPoint frame_at(const GHStructure& s, const ChartPoint& p) {
  require_admissible(s.fields, p);
  FrameAtPoint out;
  const double v = s.fields.killing_norm_sq.value(p);  // 1/V
  const double V = 1.0 / v;
  const double sv = std::sqrt(V), isv = 1.0 / sv;
  const FormJet om = s.gauge_r3.eval(make_point(r3_chart(), {p[1], p[2], p[3]}), 0);
  std::array<double, 4> w{0, 0, 0, 0};
  for (size_t slot = 0; slot < s.gauge_r3.indices().size(); ++slot)
    w[static_cast<size_t>(s.gauge_r3.indices()[slot][0] + 1)] = om.c[slot].v;
  for (int k = 0; k < 4; ++k) out.vectors[static_cast<size_t>(k)] = SmallVec::zero(4);
  out.vectors[0][0] = sv;
  for (int a = 1; a <= 3; ++a) {
    out.vectors[static_cast<size_t>(a)][0] = -w[static_cast<size_t>(a)] * isv;
    out.vectors[static_cast<size_t>(a)][a] = isv;
  }
  out.I = s.fields.complex_structures[0].values(p);
  out.J = s.fields.complex_structures[1].values(p);
  out.K = s.fields.complex_structures[2].values(p);
  return out;
}

// Residual verification of the hyperKahler conditions: closedness of the
// triple on the 4-chart and the monopole equation on the base.
inline ResidualReport verify_hyperkahler(const GHStructure& s, const SampleSpec& spec,
                                         double tol = 1e-6) {
  const auto pts = sample_points(s.fields.chart, s.fields.sample_box, spec, s.fields.admissible);
  const DifferentialForm residual3 =
      ext_d(s.gauge_r3) + hodge3(ext_d(s.potential_r3), Hodge3Frame::euclidean(r3_chart()));

  std::vector<CheckDef> checks;
  const char* names[3] = {"closedness_omega_I", "closedness_omega_J", "closedness_omega_K"};
  for (int a = 0; a < 3; ++a) {
    DifferentialForm d = ext_d(s.fields.kahler[static_cast<size_t>(a)]);
    checks.push_back(
        {names[a], "d(omega_A) = 0", tol,
         [d](const ChartPoint& p) { return d.sup_norm(p); }});
  }
  checks.push_back({"monopole", "d(omega) = -*3 dV", tol, [residual3](const ChartPoint& p) {
                      return residual3.sup_norm(make_point(r3_chart(), {p[1], p[2], p[3]}));
                    }});
  ResidualReport report = run_residual_sweep(pts, checks, spec.seed);
  report.tolerances["pde"] = tol;
  return report;
}

}  // namespace hktl
