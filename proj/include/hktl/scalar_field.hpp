#pragma once

// Pointwise-evaluable scalar fields on a chart.  A field evaluates to a
// 2-jet; arithmetic combinators propagate derivatives exactly, so fields
// assembled from the primitives below carry analytic gradients and Hessians.
// Value-only fields fall back to central finite differences, which the rest
// of the library treats as a cross-check oracle, not an accuracy source.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "hktl/chart.hpp"
#include "hktl/errors.hpp"
#include "hktl/jet.hpp"

namespace hktl {

struct FdOptions {
  bool richardson = false;  // one Richardson extrapolation level on first differences
};

namespace detail {

inline double fd_step1(double x) {
  static const double c = std::cbrt(std::numeric_limits<double>::epsilon());
  return c * std::max(1.0, std::abs(x));
}

inline double fd_step2(double x) {
  static const double c = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return c * std::max(1.0, std::abs(x));
}

inline ChartPoint shifted(const ChartPoint& p, int i, double delta) {
  SmallVec x = p.x;
  x[i] += delta;
  return ChartPoint(p.chart, x);
}

struct ScalarImpl {
  Chart chart;
  int analytic_order = 2;
  explicit ScalarImpl(Chart c, int ao) : chart(std::move(c)), analytic_order(ao) {}
  virtual ~ScalarImpl() = default;
  virtual Jet eval(const ChartPoint& p, int order) const = 0;
};

}  // namespace detail

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const detail::ScalarImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  const Chart& chart() const { return impl_->chart; }
  int dim() const { return impl_->chart.dim; }
  int analytic_order() const { return impl_->analytic_order; }
  bool has_analytic_derivatives() const { return impl_->analytic_order >= 1; }

  Jet eval(const ChartPoint& p, int order) const {
    require_same_chart(p.chart, impl_->chart, "scalar field evaluation");
    return impl_->eval(p, order);
  }

  double value(const ChartPoint& p) const { return eval(p, 0).v; }

  SmallVec gradient(const ChartPoint& p) const {
    Jet j = eval(p, 1);
    SmallVec g = SmallVec::zero(dim());
    for (int i = 0; i < dim(); ++i) g[i] = j.g[i];
    return g;
  }

  SmallMat hessian(const ChartPoint& p) const {
    Jet j = eval(p, 2);
    SmallMat h = SmallMat::zero(dim());
    for (int i = 0; i < dim(); ++i)
      for (int k = 0; k < dim(); ++k) h(i, k) = j.hess(i, k);
    return h;
  }

  // Partial derivative as a field; exact to first order, Hessian of the
  // result is finite-differenced from the parent Hessian.
  ScalarField derivative(int index) const;

  // Same values, analytic derivative information discarded.  Used to route
  // derivative checks through the finite-difference path.
  ScalarField value_only(FdOptions fd = {}) const;

  static ScalarField constant(const Chart& chart, double c);
  static ScalarField coordinate(const Chart& chart, int index);
  static ScalarField from_value(const Chart& chart, std::function<double(const ChartPoint&)> f,
                                FdOptions fd = {});
  static ScalarField from_jet(const Chart& chart, int analytic_order,
                              std::function<Jet(const ChartPoint&, int)> f);

 private:
  std::shared_ptr<const detail::ScalarImpl> impl_;
};

namespace detail {

struct ConstantImpl final : ScalarImpl {
  double c;
  ConstantImpl(Chart chart, double value) : ScalarImpl(std::move(chart), 2), c(value) {}
  Jet eval(const ChartPoint& p, int order) const override {
    return Jet::constant(p.dim(), order, c);
  }
};

struct CoordinateImpl final : ScalarImpl {
  int index;
  CoordinateImpl(Chart chart, int i) : ScalarImpl(std::move(chart), 2), index(i) {}
  Jet eval(const ChartPoint& p, int order) const override {
    return Jet::coordinate(p.dim(), order, index, p[index]);
  }
};

struct JetLeafImpl final : ScalarImpl {
  std::function<Jet(const ChartPoint&, int)> f;
  JetLeafImpl(Chart chart, int ao, std::function<Jet(const ChartPoint&, int)> fn)
      : ScalarImpl(std::move(chart), ao), f(std::move(fn)) {}
  Jet eval(const ChartPoint& p, int order) const override { return f(p, order); }
};

// Value-only leaf: gradient and Hessian by central differences.
struct ValueLeafImpl final : ScalarImpl {
  std::function<double(const ChartPoint&)> f;
  FdOptions fd;
  ValueLeafImpl(Chart chart, std::function<double(const ChartPoint&)> fn, FdOptions o)
      : ScalarImpl(std::move(chart), 0), f(std::move(fn)), fd(o) {}

  double diff1(const ChartPoint& p, int i) const {
    const double h = fd_step1(p[i]);
    const double d = (f(shifted(p, i, h)) - f(shifted(p, i, -h))) / (2.0 * h);
    if (!fd.richardson) return d;
    const double d2 = (f(shifted(p, i, h / 2)) - f(shifted(p, i, -h / 2))) / h;
    return (4.0 * d2 - d) / 3.0;
  }

  Jet eval(const ChartPoint& p, int order) const override {
    Jet j = Jet::constant(p.dim(), order, f(p));
    if (order >= 1)
      for (int i = 0; i < p.dim(); ++i) j.g[i] = diff1(p, i);
    if (order >= 2) {
      const int n = p.dim();
      for (int i = 0; i < n; ++i) {
        const double hi = fd_step2(p[i]);
        j.hess(i, i) = (f(shifted(p, i, hi)) - 2.0 * j.v + f(shifted(p, i, -hi))) / (hi * hi);
        for (int k = i + 1; k < n; ++k) {
          const double hk = fd_step2(p[k]);
          const double m =
              (f(shifted(shifted(p, i, hi), k, hk)) - f(shifted(shifted(p, i, hi), k, -hk)) -
               f(shifted(shifted(p, i, -hi), k, hk)) + f(shifted(shifted(p, i, -hi), k, -hk))) /
              (4.0 * hi * hk);
          j.hess(i, k) = m;
          j.hess(k, i) = m;
        }
      }
    }
    return j;
  }
};

enum class BinOp { Add, Sub, Mul, Div };

struct BinaryImpl final : ScalarImpl {
  BinOp op;
  ScalarField a, b;
  BinaryImpl(BinOp o, ScalarField x, ScalarField y)
      : ScalarImpl(x.chart(), std::min(x.analytic_order(), y.analytic_order())),
        op(o),
        a(std::move(x)),
        b(std::move(y)) {}
  Jet eval(const ChartPoint& p, int order) const override {
    const Jet ja = a.eval(p, order);
    const Jet jb = b.eval(p, order);
    switch (op) {
      case BinOp::Add: return ja + jb;
      case BinOp::Sub: return ja - jb;
      case BinOp::Mul: return ja * jb;
      case BinOp::Div: return ja / jb;
    }
    return ja;
  }
};

enum class UnOp { Neg, Sqrt, Inv };

struct UnaryImpl final : ScalarImpl {
  UnOp op;
  ScalarField a;
  int power = 0;
  UnaryImpl(UnOp o, ScalarField x) : ScalarImpl(x.chart(), x.analytic_order()), op(o), a(std::move(x)) {}
  Jet eval(const ChartPoint& p, int order) const override {
    const Jet j = a.eval(p, order);
    switch (op) {
      case UnOp::Neg: return -j;
      case UnOp::Sqrt: return jet_sqrt(j);
      case UnOp::Inv: return jet_inv(j);
    }
    return j;
  }
};

struct ScaleImpl final : ScalarImpl {
  double s;
  ScalarField a;
  ScaleImpl(double scale, ScalarField x)
      : ScalarImpl(x.chart(), x.analytic_order()), s(scale), a(std::move(x)) {}
  Jet eval(const ChartPoint& p, int order) const override { return s * a.eval(p, order); }
};

struct DerivImpl final : ScalarImpl {
  ScalarField a;
  int index;
  DerivImpl(ScalarField x, int i)
      : ScalarImpl(x.chart(), std::max(0, x.analytic_order() - 1)), a(std::move(x)), index(i) {}
  Jet eval(const ChartPoint& p, int order) const override {
    const Jet base = a.eval(p, std::min(2, order + 1));
    Jet j = Jet::constant(p.dim(), order, base.g[index]);
    if (order >= 1)
      for (int i = 0; i < p.dim(); ++i) j.g[i] = base.hess(index, i);
    if (order >= 2) {
      // Third derivatives of the parent: difference the parent Hessian.
      for (int i = 0; i < p.dim(); ++i) {
        const double h = fd_step1(p[i]);
        const Jet plus = a.eval(shifted(p, i, h), 2);
        const Jet minus = a.eval(shifted(p, i, -h), 2);
        for (int k = 0; k < p.dim(); ++k)
          j.hess(i, k) = (plus.hess(index, k) - minus.hess(index, k)) / (2.0 * h);
      }
      for (int i = 0; i < p.dim(); ++i)
        for (int k = i + 1; k < p.dim(); ++k) {
          const double m = 0.5 * (j.hess(i, k) + j.hess(k, i));
          j.hess(i, k) = m;
          j.hess(k, i) = m;
        }
    }
    return j;
  }
};

struct ValueOnlyImpl final : ScalarImpl {
  ScalarField a;
  ValueLeafImpl fdview;
  ValueOnlyImpl(ScalarField x, FdOptions fd)
      : ScalarImpl(x.chart(), 0),
        a(x),
        fdview(x.chart(), [x](const ChartPoint& p) { return x.value(p); }, fd) {}
  Jet eval(const ChartPoint& p, int order) const override { return fdview.eval(p, order); }
};

// Pullback f(u_1(p), ..., u_m(p)) of a field on an m-dimensional chart.
struct PullbackImpl final : ScalarImpl {
  ScalarField outer;
  std::vector<ScalarField> inner;

  static int combined_order(const ScalarField& f, const std::vector<ScalarField>& u) {
    int k = f.analytic_order();
    for (const auto& ui : u) k = std::min(k, ui.analytic_order());
    return k;
  }

  PullbackImpl(ScalarField f, std::vector<ScalarField> u)
      : ScalarImpl(u.front().chart(), combined_order(f, u)),
        outer(std::move(f)),
        inner(std::move(u)) {
    if (static_cast<int>(inner.size()) != outer.dim())
      throw ChartMismatchError("pullback arity does not match outer chart dimension");
    for (const auto& ui : inner) require_same_chart(ui.chart(), chart, "pullback inner field");
  }

  Jet eval(const ChartPoint& p, int order) const override {
    const int m = outer.dim();
    std::vector<Jet> u(m);
    SmallVec q = SmallVec::zero(m);
    for (int a = 0; a < m; ++a) {
      u[a] = inner[a].eval(p, order);
      q[a] = u[a].v;
    }
    const Jet f = outer.eval(ChartPoint(outer.chart(), q), order);
    Jet r = Jet::constant(p.dim(), order, f.v);
    if (order >= 1)
      for (int i = 0; i < p.dim(); ++i) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += f.g[a] * u[a].g[i];
        r.g[i] = s;
      }
    if (order >= 2)
      for (int i = 0; i < p.dim(); ++i)
        for (int j = 0; j < p.dim(); ++j) {
          double s = 0.0;
          for (int a = 0; a < m; ++a) {
            s += f.g[a] * u[a].hess(i, j);
            for (int b = 0; b < m; ++b) s += f.hess(a, b) * u[a].g[i] * u[b].g[j];
          }
          r.hess(i, j) = s;
        }
    return r;
  }
};

// Cheap pullback along a coordinate inclusion (e.g. an R^3 field read off
// coordinates (x,y,z) of a 4-dimensional chart).
struct LiftImpl final : ScalarImpl {
  ScalarField inner;
  std::vector<int> coord_of;  // outer coordinate index of each inner coordinate

  LiftImpl(Chart target, ScalarField f, std::vector<int> map)
      : ScalarImpl(std::move(target), f.analytic_order()),
        inner(std::move(f)),
        coord_of(std::move(map)) {}

  Jet eval(const ChartPoint& p, int order) const override {
    const int m = inner.dim();
    SmallVec q = SmallVec::zero(m);
    for (int a = 0; a < m; ++a) q[a] = p[coord_of[a]];
    const Jet f = inner.eval(ChartPoint(inner.chart(), q), order);
    Jet r = Jet::constant(p.dim(), order, f.v);
    if (order >= 1)
      for (int a = 0; a < m; ++a) r.g[coord_of[a]] = f.g[a];
    if (order >= 2)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) r.hess(coord_of[a], coord_of[b]) = f.hess(a, b);
    return r;
  }
};

}  // namespace detail

inline ScalarField ScalarField::constant(const Chart& chart, double c) {
  return ScalarField(std::make_shared<detail::ConstantImpl>(chart, c));
}

inline ScalarField ScalarField::coordinate(const Chart& chart, int index) {
  if (index < 0 || index >= chart.dim)
    throw ChartMismatchError("coordinate index out of range for chart '" + chart.name + "'");
  return ScalarField(std::make_shared<detail::CoordinateImpl>(chart, index));
}

inline ScalarField ScalarField::from_value(const Chart& chart,
                                           std::function<double(const ChartPoint&)> f,
                                           FdOptions fd) {
  return ScalarField(std::make_shared<detail::ValueLeafImpl>(chart, std::move(f), fd));
}

inline ScalarField ScalarField::from_jet(const Chart& chart, int analytic_order,
                                         std::function<Jet(const ChartPoint&, int)> f) {
  return ScalarField(std::make_shared<detail::JetLeafImpl>(chart, analytic_order, std::move(f)));
}

inline ScalarField ScalarField::derivative(int index) const {
  return ScalarField(std::make_shared<detail::DerivImpl>(*this, index));
}

inline ScalarField ScalarField::value_only(FdOptions fd) const {
  return ScalarField(std::make_shared<detail::ValueOnlyImpl>(*this, fd));
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_chart(a.chart(), b.chart(), "scalar field sum");
  return ScalarField(std::make_shared<detail::BinaryImpl>(detail::BinOp::Add, a, b));
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_chart(a.chart(), b.chart(), "scalar field difference");
  return ScalarField(std::make_shared<detail::BinaryImpl>(detail::BinOp::Sub, a, b));
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_chart(a.chart(), b.chart(), "scalar field product");
  return ScalarField(std::make_shared<detail::BinaryImpl>(detail::BinOp::Mul, a, b));
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  require_same_chart(a.chart(), b.chart(), "scalar field quotient");
  return ScalarField(std::make_shared<detail::BinaryImpl>(detail::BinOp::Div, a, b));
}
inline ScalarField operator-(const ScalarField& a) {
  return ScalarField(std::make_shared<detail::UnaryImpl>(detail::UnOp::Neg, a));
}
inline ScalarField operator*(double s, const ScalarField& a) {
  return ScalarField(std::make_shared<detail::ScaleImpl>(s, a));
}
inline ScalarField operator*(const ScalarField& a, double s) { return s * a; }
inline ScalarField operator/(const ScalarField& a, double s) { return (1.0 / s) * a; }
inline ScalarField operator+(const ScalarField& a, double s) {
  return a + ScalarField::constant(a.chart(), s);
}
inline ScalarField operator+(double s, const ScalarField& a) { return a + s; }
inline ScalarField operator-(const ScalarField& a, double s) { return a + (-s); }
inline ScalarField operator-(double s, const ScalarField& a) { return (-a) + s; }

inline ScalarField sqrt(const ScalarField& a) {
  return ScalarField(std::make_shared<detail::UnaryImpl>(detail::UnOp::Sqrt, a));
}
inline ScalarField inverse(const ScalarField& a) {
  return ScalarField(std::make_shared<detail::UnaryImpl>(detail::UnOp::Inv, a));
}

inline ScalarField pullback(const ScalarField& outer, std::vector<ScalarField> inner) {
  return ScalarField(std::make_shared<detail::PullbackImpl>(outer, std::move(inner)));
}

// Reads `inner` off the listed coordinates of `target`.
inline ScalarField lift(const Chart& target, const ScalarField& inner, std::vector<int> coord_of) {
  if (static_cast<int>(coord_of.size()) != inner.dim())
    throw ChartMismatchError("lift coordinate map has wrong arity");
  return ScalarField(std::make_shared<detail::LiftImpl>(target, inner, std::move(coord_of)));
}

}  // namespace hktl
