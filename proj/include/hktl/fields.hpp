#pragma once

// Vector and matrix fields as tuples of scalar fields.  Matrix fields carry
// the metric tensors and the complex-structure endomorphisms.

#include <vector>

#include "hktl/scalar_field.hpp"

namespace hktl {

class VectorField {
 public:
  VectorField() = default;
  VectorField(Chart chart, std::vector<ScalarField> components)
      : chart_(std::move(chart)), comps_(std::move(components)) {
    if (static_cast<int>(comps_.size()) != chart_.dim)
      throw ChartMismatchError("vector field component count does not match chart dimension");
    for (const auto& c : comps_) require_same_chart(c.chart(), chart_, "vector field component");
  }

  static VectorField constant(const Chart& chart, const SmallVec& v) {
    std::vector<ScalarField> c;
    c.reserve(chart.dim);
    for (int i = 0; i < chart.dim; ++i) c.push_back(ScalarField::constant(chart, v[i]));
    return VectorField(chart, std::move(c));
  }

  static VectorField coordinate_basis(const Chart& chart, int index) {
    SmallVec v = SmallVec::zero(chart.dim);
    v[index] = 1.0;
    return constant(chart, v);
  }

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim; }
  const ScalarField& component(int i) const { return comps_[static_cast<size_t>(i)]; }

  std::vector<Jet> eval(const ChartPoint& p, int order) const {
    std::vector<Jet> out(comps_.size());
    for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(p, order);
    return out;
  }

  SmallVec values(const ChartPoint& p) const {
    SmallVec v = SmallVec::zero(dim());
    for (int i = 0; i < dim(); ++i) v[i] = comps_[static_cast<size_t>(i)].value(p);
    return v;
  }

 private:
  Chart chart_;
  std::vector<ScalarField> comps_;
};

// Square matrix of scalar fields (row-major); used for metrics and for
// endomorphism fields acting on tangent vectors.
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(Chart chart, std::vector<ScalarField> entries)
      : chart_(std::move(chart)), entries_(std::move(entries)) {
    if (static_cast<int>(entries_.size()) != chart_.dim * chart_.dim)
      throw ChartMismatchError("matrix field entry count does not match chart dimension");
  }

  static MatrixField constant(const Chart& chart, const SmallMat& m) {
    std::vector<ScalarField> e;
    e.reserve(static_cast<size_t>(chart.dim) * chart.dim);
    for (int i = 0; i < chart.dim; ++i)
      for (int j = 0; j < chart.dim; ++j) e.push_back(ScalarField::constant(chart, m(i, j)));
    return MatrixField(chart, std::move(e));
  }

  static MatrixField identity(const Chart& chart) {
    return constant(chart, SmallMat::identity(chart.dim));
  }

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim; }
  const ScalarField& entry(int i, int j) const {
    return entries_[static_cast<size_t>(i) * chart_.dim + j];
  }

  std::vector<Jet> eval(const ChartPoint& p, int order) const {
    std::vector<Jet> out(entries_.size());
    for (size_t i = 0; i < entries_.size(); ++i) out[i] = entries_[i].eval(p, order);
    return out;
  }

  SmallMat values(const ChartPoint& p) const {
    SmallMat m = SmallMat::zero(dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) m(i, j) = entry(i, j).value(p);
    return m;
  }

  VectorField apply(const VectorField& v) const {
    std::vector<ScalarField> out;
    out.reserve(dim());
    for (int i = 0; i < dim(); ++i) {
      ScalarField s = entry(i, 0) * v.component(0);
      for (int j = 1; j < dim(); ++j) s = s + entry(i, j) * v.component(j);
      out.push_back(s);
    }
    return VectorField(chart_, std::move(out));
  }

 private:
  Chart chart_;
  std::vector<ScalarField> entries_;
};

}  // namespace hktl
