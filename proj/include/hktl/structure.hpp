#pragma once

// Common geometric payload shared by the concrete hyperKahler models: the
// metric, the Kahler triple, the circle symmetry with its dual one-forms and
// moment map, and the sampling domain.  The twist and torsion machinery is
// written against this struct only.

#include <functional>

#include "hktl/fields.hpp"
#include "hktl/forms.hpp"
#include "hktl/metric.hpp"
#include "hktl/sampling.hpp"

namespace hktl {

struct KillingData {
  VectorField killing;                            // X
  DifferentialForm killing_form;                  // alpha_0 = X-flat
  std::array<DifferentialForm, 3> moment_forms;   // alpha_I, alpha_J, alpha_K
  ScalarField killing_norm_sq;                    // g(X, X)
  MatrixField quaternionic_metric;                // alpha_0^2 + sum_A alpha_A^2
};

struct StructureFields {
  Chart chart;
  MatrixField metric;
  std::array<DifferentialForm, 3> kahler;             // omega_I, omega_J, omega_K
  std::array<MatrixField, 3> complex_structures;      // I, J, K
  VectorField killing;
  DifferentialForm killing_form;
  std::array<DifferentialForm, 3> moment_forms;
  ScalarField killing_norm_sq;
  std::array<ScalarField, 3> moment_map;
  MatrixField quaternionic_metric;
  Hodge3Frame hodge_frame;
  Box sample_box;
  std::function<bool(const ChartPoint&)> admissible;

  KillingData killing_data() const {
    return KillingData{killing, killing_form, moment_forms, killing_norm_sq,
                       quaternionic_metric};
  }

  std::array<double, 3> moment_at(const ChartPoint& p) const {
    return {moment_map[0].value(p), moment_map[1].value(p), moment_map[2].value(p)};
  }
};

// 2-form evaluated to its antisymmetric coefficient matrix at a point.
inline SmallMat two_form_matrix(const DifferentialForm& form, const ChartPoint& p) {
  if (form.degree() != 2) throw ChartMismatchError("two_form_matrix expects a 2-form");
  SmallMat m = SmallMat::zero(form.dim());
  const FormJet j = form.eval(p, 0);
  for (size_t s = 0; s < form.indices().size(); ++s) {
    const MultiIndex& mi = form.indices()[s];
    m(mi[0], mi[1]) = j.c[s].v;
    m(mi[1], mi[0]) = -j.c[s].v;
  }
  return m;
}

// Symmetric matrix field alpha (x) alpha summed over the given 1-forms, each
// expanded to dense coefficient fields first.
inline MatrixField sym_square_sum(const Chart& chart,
                                  const std::vector<DifferentialForm>& one_forms) {
  const int n = chart.dim;
  std::vector<std::vector<ScalarField>> coeffs;
  for (const auto& f : one_forms) {
    if (f.degree() != 1) throw ChartMismatchError("sym_square_sum expects 1-forms");
    std::vector<ScalarField> row(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<size_t>(i)] = ScalarField::constant(chart, 0.0);
    for (size_t s = 0; s < f.indices().size(); ++s) {
      const int i = f.indices()[s][0];
      row[static_cast<size_t>(i)] = ScalarField::from_jet(
          chart, 2, [f, s](const ChartPoint& p, int order) { return f.eval(p, order).c[s]; });
    }
    coeffs.push_back(std::move(row));
  }
  std::vector<ScalarField> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarField e = ScalarField::constant(chart, 0.0);
      for (const auto& row : coeffs)
        e = e + row[static_cast<size_t>(i)] * row[static_cast<size_t>(j)];
      entries.push_back(std::move(e));
    }
  return MatrixField(chart, std::move(entries));
}

}  // namespace hktl
