#pragma once

// Musical isomorphisms for a metric field, and the three-dimensional Hodge
// star on the span of a declared orthogonal frame of 1-forms.  The star acts
// by the cyclic rule *alpha_I = alpha_J ^ alpha_K; inputs are decomposed
// pointwise against the frame and rejected when they leave its span.

#include "hktl/forms.hpp"
#include "hktl/linalg.hpp"

namespace hktl {

inline DifferentialForm musical_flat(const MatrixField& g, const VectorField& v) {
  require_same_chart(g.chart(), v.chart(), "flat");
  std::vector<std::pair<MultiIndex, ScalarField>> comps;
  for (int i = 0; i < g.dim(); ++i) {
    ScalarField ci = g.entry(i, 0) * v.component(0);
    for (int j = 1; j < g.dim(); ++j) ci = ci + g.entry(i, j) * v.component(j);
    MultiIndex mi;
    mi.idx[mi.len++] = static_cast<std::uint8_t>(i);
    comps.emplace_back(mi, std::move(ci));
  }
  return DifferentialForm::from_components(g.chart(), 1, std::move(comps));
}

namespace detail {

// Jet-level solve of G v = b: the value solves directly, derivative levels
// follow from differentiating G v = b.
inline std::vector<Jet> jet_solve(const std::vector<Jet>& gj, const std::vector<Jet>& bj, int n,
                                  int order, const ChartPoint& p) {
  SmallMat g0 = SmallMat::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g0(i, j) = gj[static_cast<size_t>(i) * n + j].v;

  {
    const SmallVec ev = sym_eigenvalues(g0);
    if (ev[0] <= 1e-12) {
      std::ostringstream os;
      os << "metric not positive definite: eigenvalues (";
      for (int i = 0; i < n; ++i) os << (i ? ", " : "") << ev[i];
      os << ")";
      throw DegeneracyError(os.str(), p.coords_vec());
    }
  }

  SmallVec b0 = SmallVec::zero(n);
  for (int i = 0; i < n; ++i) b0[i] = bj[static_cast<size_t>(i)].v;
  const SmallVec v0 = solve(g0, b0);

  std::vector<Jet> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = Jet::constant(p.dim(), order, v0[i]);
  }
  if (order >= 1) {
    std::array<SmallVec, kMaxDim> dv;
    for (int d = 0; d < p.dim(); ++d) {
      SmallVec rhs = SmallVec::zero(n);
      for (int i = 0; i < n; ++i) {
        double s = bj[static_cast<size_t>(i)].g[d];
        for (int j = 0; j < n; ++j) s -= gj[static_cast<size_t>(i) * n + j].g[d] * v0[j];
        rhs[i] = s;
      }
      dv[static_cast<size_t>(d)] = solve(g0, rhs);
      for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)].g[d] = dv[static_cast<size_t>(d)][i];
    }
    if (order >= 2) {
      for (int d = 0; d < p.dim(); ++d)
        for (int e = 0; e < p.dim(); ++e) {
          SmallVec rhs = SmallVec::zero(n);
          for (int i = 0; i < n; ++i) {
            double s = bj[static_cast<size_t>(i)].hess(d, e);
            for (int j = 0; j < n; ++j) {
              const Jet& gij = gj[static_cast<size_t>(i) * n + j];
              s -= gij.hess(d, e) * v0[j];
              s -= gij.g[d] * dv[static_cast<size_t>(e)][j];
              s -= gij.g[e] * dv[static_cast<size_t>(d)][j];
            }
            rhs[i] = s;
          }
          const SmallVec h = solve(g0, rhs);
          for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)].hess(d, e) = h[i];
        }
    }
  }
  return out;
}

}  // namespace detail

inline VectorField musical_sharp(const MatrixField& g, const DifferentialForm& a) {
  require_same_chart(g.chart(), a.chart(), "sharp");
  if (a.degree() != 1) throw ChartMismatchError("sharp expects a 1-form");
  const int n = g.dim();
  std::vector<ScalarField> comps;
  comps.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    comps.push_back(ScalarField::from_jet(
        g.chart(), 2, [g, a, n, i](const ChartPoint& p, int order) {
          const std::vector<Jet> gj = g.eval(p, order);
          std::vector<Jet> bj(static_cast<size_t>(n), Jet::constant(p.dim(), order, 0.0));
          const FormJet aj = a.eval(p, order);
          for (size_t s = 0; s < a.indices().size(); ++s)
            bj[static_cast<size_t>(a.indices()[s][0])] = aj.c[s];
          return detail::jet_solve(gj, bj, n, order, p)[static_cast<size_t>(i)];
        }));
  }
  return VectorField(g.chart(), std::move(comps));
}

// Orthogonal frame data for the 3d star, with alpha[A](dual[B]) = delta_AB.
struct Hodge3Frame {
  std::array<DifferentialForm, 3> alpha;
  std::array<VectorField, 3> dual;
  double span_tol = 1e-9;

  static Hodge3Frame euclidean(const Chart& chart) {
    if (chart.dim != 3) throw ChartMismatchError("euclidean Hodge frame expects a 3d chart");
    Hodge3Frame f;
    for (int a = 0; a < 3; ++a) {
      MultiIndex mi;
      mi.idx[mi.len++] = static_cast<std::uint8_t>(a);
      f.alpha[static_cast<size_t>(a)] = DifferentialForm::from_components(
          chart, 1, {{mi, ScalarField::constant(chart, 1.0)}});
      f.dual[static_cast<size_t>(a)] = VectorField::coordinate_basis(chart, a);
    }
    return f;
  }
};

namespace detail {

struct Hodge3Impl final : FormImpl {
  DifferentialForm input, output, remainder;
  double tol;

  Hodge3Impl(DifferentialForm in, DifferentialForm out, DifferentialForm rem, double span_tol)
      : FormImpl(out.chart(), out.degree()),
        input(std::move(in)),
        output(std::move(out)),
        remainder(std::move(rem)),
        tol(span_tol) {
    indices = output.indices();
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    const double viol = remainder.sup_norm(p);
    if (viol > tol) {
      std::ostringstream os;
      os << "hodge3 input leaves the frame span: component norm " << viol << " > " << tol;
      throw SpanViolationError(os.str(), p.coords_vec());
    }
    return output.eval(p, order);
  }
};

}  // namespace detail

inline DifferentialForm hodge3(const DifferentialForm& a, const Hodge3Frame& frame) {
  const Chart& chart = a.chart();
  const auto& al = frame.alpha;
  const auto& du = frame.dual;
  if (a.degree() == 1) {
    std::array<ScalarField, 3> c;
    for (int A = 0; A < 3; ++A) c[static_cast<size_t>(A)] = pair_with(du[static_cast<size_t>(A)], a);
    DifferentialForm out = c[0] * wedge(al[1], al[2]) + c[1] * wedge(al[2], al[0]) +
                           c[2] * wedge(al[0], al[1]);
    DifferentialForm recon = c[0] * al[0] + c[1] * al[1] + c[2] * al[2];
    return DifferentialForm(
        std::make_shared<detail::Hodge3Impl>(a, out, a - recon, frame.span_tol));
  }
  if (a.degree() == 2) {
    auto comp = [&](int A, int B) {
      return pair_with(du[static_cast<size_t>(B)], interior_product(du[static_cast<size_t>(A)], a));
    };
    const ScalarField cJK = comp(1, 2), cKI = comp(2, 0), cIJ = comp(0, 1);
    DifferentialForm out = cJK * al[0] + cKI * al[1] + cIJ * al[2];
    DifferentialForm recon =
        cJK * wedge(al[1], al[2]) + cKI * wedge(al[2], al[0]) + cIJ * wedge(al[0], al[1]);
    return DifferentialForm(
        std::make_shared<detail::Hodge3Impl>(a, out, a - recon, frame.span_tol));
  }
  throw CapabilityError("hodge3 is defined on 1- and 2-forms of the frame span");
}

inline SmallVec metric_eigenvalues(const MatrixField& g, const ChartPoint& p) {
  return sym_eigenvalues(g.values(p));
}

}  // namespace hktl
