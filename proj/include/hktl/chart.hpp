#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hktl/errors.hpp"
#include "hktl/jet.hpp"
#include "hktl/linalg.hpp"

namespace hktl {

// A single coordinate chart.  The library works chart-locally throughout;
// there is no atlas, only declared exclusion zones inside one chart.
struct Chart {
  int dim = 0;
  std::string name;

  bool operator==(const Chart& o) const { return dim == o.dim && name == o.name; }
  bool operator!=(const Chart& o) const { return !(*this == o); }
};

struct ChartPoint {
  Chart chart;
  SmallVec x;

  ChartPoint() = default;
  ChartPoint(Chart c, SmallVec coords) : chart(std::move(c)), x(coords) {
    if (x.n != chart.dim) throw ChartMismatchError("point size does not match chart dimension");
    for (int i = 0; i < x.n; ++i)
      if (!std::isfinite(x[i])) throw EvaluationError("non-finite chart coordinate", coords_vec());
  }

  double operator[](int i) const { return x[i]; }
  int dim() const { return chart.dim; }

  std::vector<double> coords_vec() const {
    return std::vector<double>(x.a.begin(), x.a.begin() + x.n);
  }
};

inline ChartPoint make_point(const Chart& chart, std::initializer_list<double> coords) {
  SmallVec v = SmallVec::zero(static_cast<int>(coords.size()));
  int i = 0;
  for (double c : coords) v[i++] = c;
  return ChartPoint(chart, v);
}

inline ChartPoint make_point(const Chart& chart, const std::vector<double>& coords) {
  SmallVec v = SmallVec::zero(static_cast<int>(coords.size()));
  for (size_t i = 0; i < coords.size(); ++i) v[static_cast<int>(i)] = coords[i];
  return ChartPoint(chart, v);
}

inline void require_same_chart(const Chart& a, const Chart& b, const char* what) {
  if (a != b)
    throw ChartMismatchError(std::string(what) + ": charts '" + a.name + "' (dim " +
                             std::to_string(a.dim) + ") and '" + b.name + "' (dim " +
                             std::to_string(b.dim) + ") differ");
}

}  // namespace hktl
