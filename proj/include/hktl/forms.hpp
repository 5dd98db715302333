#pragma once

// Differential forms on a chart.  Coefficients are stored sparsely on
// strictly increasing multi-indices; antisymmetry is structural.  Forms are
// immutable expression nodes evaluated pointwise to jets of all coefficients
// at once, so exterior derivatives stay analytic as long as the leaves are.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hktl/fields.hpp"
#include "hktl/scalar_field.hpp"

namespace hktl {

struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> idx{};
  std::uint8_t len = 0;

  int size() const { return len; }
  int operator[](int k) const { return idx[static_cast<size_t>(k)]; }

  bool operator==(const MultiIndex& o) const {
    if (len != o.len) return false;
    for (int k = 0; k < len; ++k)
      if (idx[k] != o.idx[k]) return false;
    return true;
  }
  bool operator<(const MultiIndex& o) const {
    if (len != o.len) return len < o.len;
    for (int k = 0; k < len; ++k)
      if (idx[k] != o.idx[k]) return idx[k] < o.idx[k];
    return false;
  }

  bool contains(int i) const {
    for (int k = 0; k < len; ++k)
      if (idx[k] == i) return true;
    return false;
  }

  static MultiIndex of(std::initializer_list<int> is) {
    MultiIndex m;
    for (int i : is) m.idx[m.len++] = static_cast<std::uint8_t>(i);
    for (int k = 1; k < m.len; ++k)
      if (m.idx[k - 1] >= m.idx[k]) throw std::logic_error("multi-index must be increasing");
    return m;
  }
};

// Sorts an arbitrary index tuple; returns the increasing index and the sign
// of the sorting permutation, or nothing when an index repeats.
inline std::optional<std::pair<MultiIndex, double>> sort_index(std::vector<int> v) {
  double sign = 1.0;
  for (size_t i = 1; i < v.size(); ++i)
    for (size_t j = i; j > 0 && v[j - 1] > v[j]; --j) {
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] == v[i]) return std::nullopt;
  MultiIndex m;
  for (int i : v) m.idx[m.len++] = static_cast<std::uint8_t>(i);
  return std::make_pair(m, sign);
}

inline std::optional<std::pair<MultiIndex, double>> merge_indices(const MultiIndex& a,
                                                                  const MultiIndex& b) {
  std::vector<int> v;
  v.reserve(static_cast<size_t>(a.len) + b.len);
  for (int k = 0; k < a.len; ++k) v.push_back(a[k]);
  for (int k = 0; k < b.len; ++k) v.push_back(b[k]);
  return sort_index(std::move(v));
}

// Inserts index i; sign is (-1)^position of insertion.
inline std::optional<std::pair<MultiIndex, double>> insert_index(const MultiIndex& m, int i) {
  if (m.contains(i)) return std::nullopt;
  MultiIndex r;
  double sign = 1.0;
  bool placed = false;
  for (int k = 0; k < m.len; ++k) {
    if (!placed && i < m[k]) {
      r.idx[r.len++] = static_cast<std::uint8_t>(i);
      placed = true;
    }
    if (!placed) sign = -sign;
    r.idx[r.len++] = static_cast<std::uint8_t>(m[k]);
  }
  if (!placed) r.idx[r.len++] = static_cast<std::uint8_t>(i);
  return std::make_pair(r, sign);
}

inline MultiIndex remove_at(const MultiIndex& m, int pos) {
  MultiIndex r;
  for (int k = 0; k < m.len; ++k)
    if (k != pos) r.idx[r.len++] = m.idx[static_cast<size_t>(k)];
  return r;
}

// Jets of every stored coefficient at one point, aligned with indices().
struct FormJet {
  std::vector<Jet> c;
};

namespace detail {

struct FormImpl {
  Chart chart;
  int degree = 0;
  std::vector<MultiIndex> indices;  // sorted, unique

  FormImpl(Chart c, int deg) : chart(std::move(c)), degree(deg) {}
  virtual ~FormImpl() = default;
  virtual FormJet eval(const ChartPoint& p, int order) const = 0;

  int slot_of(const MultiIndex& m) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), m);
    if (it == indices.end() || !(*it == m)) return -1;
    return static_cast<int>(it - indices.begin());
  }
};

}  // namespace detail

class DifferentialForm {
 public:
  DifferentialForm() = default;
  explicit DifferentialForm(std::shared_ptr<const detail::FormImpl> impl)
      : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  const Chart& chart() const { return impl_->chart; }
  int dim() const { return impl_->chart.dim; }
  int degree() const { return impl_->degree; }
  const std::vector<MultiIndex>& indices() const { return impl_->indices; }

  FormJet eval(const ChartPoint& p, int order = 0) const {
    require_same_chart(p.chart, impl_->chart, "form evaluation");
    return impl_->eval(p, order);
  }

  // Coefficient on an arbitrary (not necessarily increasing) index tuple;
  // antisymmetry supplies the sign, absent slots read as zero.
  double coefficient(const ChartPoint& p, const std::vector<int>& index) const {
    auto sorted = sort_index(index);
    if (!sorted) return 0.0;
    const int slot = impl_->slot_of(sorted->first);
    if (slot < 0) return 0.0;
    return sorted->second * eval(p, 0).c[static_cast<size_t>(slot)].v;
  }

  double sup_norm(const ChartPoint& p) const {
    const FormJet j = eval(p, 0);
    double m = 0.0;
    for (const Jet& c : j.c) m = std::max(m, std::abs(c.v));
    return m;
  }

  static DifferentialForm zero(const Chart& chart, int degree);
  static DifferentialForm from_components(
      const Chart& chart, int degree,
      std::vector<std::pair<MultiIndex, ScalarField>> components);
  static DifferentialForm scalar(const ScalarField& f);

 private:
  std::shared_ptr<const detail::FormImpl> impl_;
};

namespace detail {

struct LeafForm final : FormImpl {
  std::vector<ScalarField> coeffs;

  LeafForm(Chart chart, int degree, std::vector<std::pair<MultiIndex, ScalarField>> comps)
      : FormImpl(std::move(chart), degree) {
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [mi, f] : comps) {
      if (mi.size() != degree) throw std::logic_error("component index length != form degree");
      if (!indices.empty() && indices.back() == mi) {
        coeffs.back() = coeffs.back() + f;
      } else {
        indices.push_back(mi);
        coeffs.push_back(std::move(f));
      }
    }
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    FormJet j;
    j.c.resize(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) j.c[i] = coeffs[i].eval(p, order);
    return j;
  }
};

struct LinearForm final : FormImpl {
  struct Term {
    double weight;
    DifferentialForm form;
    std::vector<int> slot_map;  // child slot -> union slot
  };
  std::vector<Term> terms;

  LinearForm(Chart chart, int degree, std::vector<std::pair<double, DifferentialForm>> in)
      : FormImpl(std::move(chart), degree) {
    std::vector<MultiIndex> all;
    for (auto& [w, f] : in)
      for (const auto& mi : f.indices()) all.push_back(mi);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    indices = std::move(all);
    for (auto& [w, f] : in) {
      Term t{w, f, {}};
      for (const auto& mi : f.indices()) t.slot_map.push_back(slot_of(mi));
      terms.push_back(std::move(t));
    }
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    FormJet out;
    out.c.assign(indices.size(), Jet::constant(chart.dim, order, 0.0));
    for (const auto& t : terms) {
      const FormJet cj = t.form.eval(p, order);
      for (size_t s = 0; s < cj.c.size(); ++s)
        out.c[static_cast<size_t>(t.slot_map[s])] =
            out.c[static_cast<size_t>(t.slot_map[s])] + t.weight * cj.c[s];
    }
    return out;
  }
};

struct ScalarMulForm final : FormImpl {
  ScalarField s;
  DifferentialForm a;
  ScalarMulForm(ScalarField f, DifferentialForm form)
      : FormImpl(form.chart(), form.degree()), s(std::move(f)), a(std::move(form)) {
    indices = a.indices();
  }
  FormJet eval(const ChartPoint& p, int order) const override {
    const Jet sj = s.eval(p, order);
    FormJet j = a.eval(p, order);
    for (Jet& c : j.c) c = sj * c;
    return j;
  }
};

struct WedgeForm final : FormImpl {
  DifferentialForm a, b;
  struct Term {
    int ia, ib, target;
    double sign;
  };
  std::vector<Term> plan;

  WedgeForm(DifferentialForm x, DifferentialForm y)
      : FormImpl(x.chart(), x.degree() + y.degree()), a(std::move(x)), b(std::move(y)) {
    std::vector<MultiIndex> targets;
    for (size_t ia = 0; ia < a.indices().size(); ++ia)
      for (size_t ib = 0; ib < b.indices().size(); ++ib)
        if (auto m = merge_indices(a.indices()[ia], b.indices()[ib])) targets.push_back(m->first);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    indices = std::move(targets);
    for (size_t ia = 0; ia < a.indices().size(); ++ia)
      for (size_t ib = 0; ib < b.indices().size(); ++ib)
        if (auto m = merge_indices(a.indices()[ia], b.indices()[ib]))
          plan.push_back({static_cast<int>(ia), static_cast<int>(ib), slot_of(m->first), m->second});
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    const FormJet ja = a.eval(p, order);
    const FormJet jb = b.eval(p, order);
    FormJet out;
    out.c.assign(indices.size(), Jet::constant(chart.dim, order, 0.0));
    for (const auto& t : plan)
      out.c[static_cast<size_t>(t.target)] =
          out.c[static_cast<size_t>(t.target)] +
          t.sign * (ja.c[static_cast<size_t>(t.ia)] * jb.c[static_cast<size_t>(t.ib)]);
    return out;
  }
};

struct ExtDForm final : FormImpl {
  DifferentialForm a;
  struct Term {
    int src, coord, target;
    double sign;
  };
  std::vector<Term> plan;

  explicit ExtDForm(DifferentialForm x) : FormImpl(x.chart(), x.degree() + 1), a(std::move(x)) {
    std::vector<MultiIndex> targets;
    for (size_t s = 0; s < a.indices().size(); ++s)
      for (int j = 0; j < chart.dim; ++j)
        if (auto m = insert_index(a.indices()[s], j)) targets.push_back(m->first);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    indices = std::move(targets);
    for (size_t s = 0; s < a.indices().size(); ++s)
      for (int j = 0; j < chart.dim; ++j)
        if (auto m = insert_index(a.indices()[s], j))
          plan.push_back({static_cast<int>(s), j, slot_of(m->first), m->second});
  }

  FormJet eval_level(const ChartPoint& p, int order) const {
    // Coefficients of d(a) need one more derivative level from a.
    const FormJet ja = a.eval(p, std::min(2, order + 1));
    FormJet out;
    out.c.assign(indices.size(), Jet::constant(chart.dim, order, 0.0));
    for (const auto& t : plan) {
      const Jet& src = ja.c[static_cast<size_t>(t.src)];
      Jet& dst = out.c[static_cast<size_t>(t.target)];
      dst.v += t.sign * src.g[t.coord];
      if (order >= 1)
        for (int i = 0; i < chart.dim; ++i) dst.g[i] += t.sign * src.hess(t.coord, i);
    }
    for (const Jet& c : out.c)
      if (!std::isfinite(c.v))
        throw EvaluationError("non-finite exterior derivative", p.coords_vec());
    return out;
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    FormJet out = eval_level(p, std::min(order, 1));
    for (Jet& c : out.c) c.order = order;
    if (order >= 2) {
      // Second derivatives of d(a) would need third derivatives of a;
      // difference our own analytic gradients instead.
      for (int i = 0; i < chart.dim; ++i) {
        const double h = fd_step1(p[i]);
        const FormJet plus = eval_level(shifted(p, i, h), 1);
        const FormJet minus = eval_level(shifted(p, i, -h), 1);
        for (size_t s = 0; s < out.c.size(); ++s)
          for (int k = 0; k < chart.dim; ++k)
            out.c[s].hess(i, k) = (plus.c[s].g[k] - minus.c[s].g[k]) / (2.0 * h);
      }
      for (Jet& c : out.c)
        for (int i = 0; i < chart.dim; ++i)
          for (int k = i + 1; k < chart.dim; ++k) {
            const double m = 0.5 * (c.hess(i, k) + c.hess(k, i));
            c.hess(i, k) = m;
            c.hess(k, i) = m;
          }
    }
    return out;
  }
};

struct InteriorForm final : FormImpl {
  VectorField xfield;
  DifferentialForm a;
  struct Term {
    int src, comp, target;
    double sign;
  };
  std::vector<Term> plan;

  InteriorForm(VectorField x, DifferentialForm form)
      : FormImpl(form.chart(), form.degree() - 1), xfield(std::move(x)), a(std::move(form)) {
    std::vector<MultiIndex> targets;
    for (size_t s = 0; s < a.indices().size(); ++s)
      for (int k = 0; k < a.indices()[s].size(); ++k)
        targets.push_back(remove_at(a.indices()[s], k));
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    indices = std::move(targets);
    for (size_t s = 0; s < a.indices().size(); ++s)
      for (int k = 0; k < a.indices()[s].size(); ++k)
        plan.push_back({static_cast<int>(s), a.indices()[s][k],
                        slot_of(remove_at(a.indices()[s], k)), (k % 2 == 0) ? 1.0 : -1.0});
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    const FormJet ja = a.eval(p, order);
    const std::vector<Jet> xj = xfield.eval(p, order);
    FormJet out;
    out.c.assign(indices.size(), Jet::constant(chart.dim, order, 0.0));
    for (const auto& t : plan)
      out.c[static_cast<size_t>(t.target)] =
          out.c[static_cast<size_t>(t.target)] +
          t.sign * (xj[static_cast<size_t>(t.comp)] * ja.c[static_cast<size_t>(t.src)]);
    return out;
  }
};

// (A.a)(v_1,...,v_p) = (-1)^p a(A v_1, ..., A v_p).
struct EndoForm final : FormImpl {
  MatrixField endo;
  DifferentialForm a;
  double outer_sign = 1.0;

  EndoForm(MatrixField m, DifferentialForm form)
      : FormImpl(form.chart(), form.degree()), endo(std::move(m)), a(std::move(form)) {
    outer_sign = (degree % 2 == 0) ? 1.0 : -1.0;
    // Dense target pattern: every increasing index of this degree.
    MultiIndex cur;
    build(cur, 0);
    std::sort(indices.begin(), indices.end());
  }

  void build(MultiIndex& cur, int next) {
    if (cur.size() == degree) {
      indices.push_back(cur);
      return;
    }
    for (int i = next; i < chart.dim; ++i) {
      cur.idx[cur.len++] = static_cast<std::uint8_t>(i);
      build(cur, i + 1);
      --cur.len;
    }
  }

  FormJet eval(const ChartPoint& p, int order) const override {
    const FormJet ja = a.eval(p, order);
    const std::vector<Jet> mj = endo.eval(p, order);
    const int n = chart.dim;
    auto entry = [&](int i, int j) -> const Jet& { return mj[static_cast<size_t>(i) * n + j]; };

    FormJet out;
    out.c.assign(indices.size(), Jet::constant(n, order, 0.0));
    const int d = degree;
    for (size_t t = 0; t < indices.size(); ++t) {
      const MultiIndex& J = indices[t];
      Jet acc = Jet::constant(n, order, 0.0);
      for (size_t s = 0; s < a.indices().size(); ++s) {
        const MultiIndex& I = a.indices()[s];
        // det of the p x p block A[I rows, J cols]
        Jet det = Jet::constant(n, order, 0.0);
        if (d == 1) {
          det = entry(I[0], J[0]);
        } else if (d == 2) {
          det = entry(I[0], J[0]) * entry(I[1], J[1]) - entry(I[0], J[1]) * entry(I[1], J[0]);
        } else if (d == 3) {
          det = entry(I[0], J[0]) *
                    (entry(I[1], J[1]) * entry(I[2], J[2]) - entry(I[1], J[2]) * entry(I[2], J[1])) -
                entry(I[0], J[1]) *
                    (entry(I[1], J[0]) * entry(I[2], J[2]) - entry(I[1], J[2]) * entry(I[2], J[0])) +
                entry(I[0], J[2]) *
                    (entry(I[1], J[0]) * entry(I[2], J[1]) - entry(I[1], J[1]) * entry(I[2], J[0]));
        } else {
          throw CapabilityError("endomorphism action supports degrees 1..3");
        }
        acc = acc + ja.c[s] * det;
      }
      out.c[t] = outer_sign * acc;
    }
    return out;
  }
};

struct ZeroForm final : FormImpl {
  ZeroForm(Chart chart, int degree) : FormImpl(std::move(chart), degree) {}
  FormJet eval(const ChartPoint& p, int order) const override {
    (void)p;
    (void)order;
    return FormJet{};
  }
};

}  // namespace detail

inline DifferentialForm DifferentialForm::zero(const Chart& chart, int degree) {
  return DifferentialForm(std::make_shared<detail::ZeroForm>(chart, degree));
}

inline DifferentialForm DifferentialForm::from_components(
    const Chart& chart, int degree, std::vector<std::pair<MultiIndex, ScalarField>> components) {
  if (degree < 0 || degree > chart.dim)
    throw ChartMismatchError("form degree out of range for chart");
  return DifferentialForm(std::make_shared<detail::LeafForm>(chart, degree, std::move(components)));
}

inline DifferentialForm DifferentialForm::scalar(const ScalarField& f) {
  return from_components(f.chart(), 0, {{MultiIndex{}, f}});
}

inline DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a.chart(), b.chart(), "form sum");
  if (a.degree() != b.degree()) throw ChartMismatchError("form sum: degrees differ");
  return DifferentialForm(
      std::make_shared<detail::LinearForm>(a.chart(), a.degree(),
                                           std::vector<std::pair<double, DifferentialForm>>{
                                               {1.0, a}, {1.0, b}}));
}

inline DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a.chart(), b.chart(), "form difference");
  if (a.degree() != b.degree()) throw ChartMismatchError("form difference: degrees differ");
  return DifferentialForm(
      std::make_shared<detail::LinearForm>(a.chart(), a.degree(),
                                           std::vector<std::pair<double, DifferentialForm>>{
                                               {1.0, a}, {-1.0, b}}));
}

inline DifferentialForm operator*(double s, const DifferentialForm& a) {
  return DifferentialForm(std::make_shared<detail::LinearForm>(
      a.chart(), a.degree(), std::vector<std::pair<double, DifferentialForm>>{{s, a}}));
}

inline DifferentialForm operator*(const ScalarField& s, const DifferentialForm& a) {
  return DifferentialForm(std::make_shared<detail::ScalarMulForm>(s, a));
}

inline DifferentialForm operator-(const DifferentialForm& a) { return -1.0 * a; }

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a.chart(), b.chart(), "wedge");
  if (a.degree() + b.degree() > a.dim())
    throw ChartMismatchError("wedge: degrees exceed chart dimension");
  return DifferentialForm(std::make_shared<detail::WedgeForm>(a, b));
}

inline DifferentialForm ext_d(const DifferentialForm& a) {
  if (a.degree() == a.dim()) return DifferentialForm::zero(a.chart(), a.degree() + 1);
  return DifferentialForm(std::make_shared<detail::ExtDForm>(a));
}

inline DifferentialForm ext_d(const ScalarField& f) { return ext_d(DifferentialForm::scalar(f)); }

inline DifferentialForm interior_product(const VectorField& x, const DifferentialForm& a) {
  require_same_chart(x.chart(), a.chart(), "interior product");
  if (a.degree() < 1)
    throw ChartMismatchError("interior product requires a form of degree >= 1");
  return DifferentialForm(std::make_shared<detail::InteriorForm>(x, a));
}

inline DifferentialForm endo_action(const MatrixField& m, const DifferentialForm& a) {
  require_same_chart(m.chart(), a.chart(), "endomorphism action");
  if (a.degree() < 1 || a.degree() > 3)
    throw CapabilityError("endomorphism action supports degrees 1..3");
  return DifferentialForm(std::make_shared<detail::EndoForm>(m, a));
}

// Pairing with a vector field as a scalar field: (x ⌟ a) for degree-1 a.
inline ScalarField pair_with(const VectorField& x, const DifferentialForm& a) {
  if (a.degree() != 1) throw ChartMismatchError("pair_with expects a 1-form");
  const DifferentialForm c = interior_product(x, a);
  return ScalarField::from_jet(a.chart(), 2, [c](const ChartPoint& p, int order) {
    const FormJet j = c.eval(p, order);
    if (j.c.empty()) return Jet::constant(p.dim(), order, 0.0);
    return j.c[0];
  });
}

}  // namespace hktl
