#pragma once

// Harmonic functions on R^3: constant + signed point sources + harmonic
// polynomial of degree <= 3.  Values, gradients and Hessians are analytic;
// harmonicity of the polynomial part is checked symbolically on the
// coefficient array, so the Laplacian of a validated potential vanishes to
// rounding by construction.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hktl/chart.hpp"
#include "hktl/jet.hpp"
#include "hktl/scalar_field.hpp"

namespace hktl {

inline const Chart& r3_chart() {
  static const Chart c{3, "r3"};
  return c;
}

struct PointSource {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  int sigma = 1;  // source term is sigma / (2 |p - center|)
};

class Polynomial3 {
 public:
  using Exponents = std::array<int, 3>;

  Polynomial3() = default;

  Polynomial3& add(int ex, int ey, int ez, double coeff) {
    if (ex < 0 || ey < 0 || ez < 0 || ex + ey + ez > 3)
      throw ConfigError("polynomial monomial degree must be between 0 and 3");
    if (coeff != 0.0) coeffs_[{ex, ey, ez}] += coeff;
    return *this;
  }

  const std::map<Exponents, double>& terms() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : coeffs_)
      if (c != 0.0) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  Polynomial3 laplacian() const {
    Polynomial3 out;
    for (const auto& [e, c] : coeffs_) {
      if (e[0] >= 2) out.add(e[0] - 2, e[1], e[2], c * e[0] * (e[0] - 1));
      if (e[1] >= 2) out.add(e[0], e[1] - 2, e[2], c * e[1] * (e[1] - 1));
      if (e[2] >= 2) out.add(e[0], e[1], e[2] - 2, c * e[2] * (e[2] - 1));
    }
    return out;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Jet eval(const SmallVec& p, int order) const {
    Jet j = Jet::constant(3, order, 0.0);
    auto powi = [](double x, int n) {
      double r = 1.0;
      for (int k = 0; k < n; ++k) r *= x;
      return r;
    };
    for (const auto& [e, c] : coeffs_) {
      const double px = powi(p[0], e[0]), py = powi(p[1], e[1]), pz = powi(p[2], e[2]);
      j.v += c * px * py * pz;
      if (order >= 1) {
        if (e[0] > 0) j.g[0] += c * e[0] * powi(p[0], e[0] - 1) * py * pz;
        if (e[1] > 0) j.g[1] += c * e[1] * px * powi(p[1], e[1] - 1) * pz;
        if (e[2] > 0) j.g[2] += c * e[2] * px * py * powi(p[2], e[2] - 1);
      }
      if (order >= 2) {
        if (e[0] > 1) j.hess(0, 0) += c * e[0] * (e[0] - 1) * powi(p[0], e[0] - 2) * py * pz;
        if (e[1] > 1) j.hess(1, 1) += c * e[1] * (e[1] - 1) * px * powi(p[1], e[1] - 2) * pz;
        if (e[2] > 1) j.hess(2, 2) += c * e[2] * (e[2] - 1) * px * py * powi(p[2], e[2] - 2);
        if (e[0] > 0 && e[1] > 0) {
          const double m = c * e[0] * e[1] * powi(p[0], e[0] - 1) * powi(p[1], e[1] - 1) * pz;
          j.hess(0, 1) += m;
          j.hess(1, 0) += m;
        }
        if (e[0] > 0 && e[2] > 0) {
          const double m = c * e[0] * e[2] * powi(p[0], e[0] - 1) * py * powi(p[2], e[2] - 1);
          j.hess(0, 2) += m;
          j.hess(2, 0) += m;
        }
        if (e[1] > 0 && e[2] > 0) {
          const double m = c * e[1] * e[2] * px * powi(p[1], e[1] - 1) * powi(p[2], e[2] - 1);
          j.hess(1, 2) += m;
          j.hess(2, 1) += m;
        }
      }
    }
    return j;
  }

 private:
  std::map<Exponents, double> coeffs_;
};

class HarmonicPotential {
 public:
  HarmonicPotential() : HarmonicPotential(0.0, {}, {}) {}

  HarmonicPotential(double constant, std::vector<PointSource> sources, Polynomial3 poly = {})
      : constant_(constant), sources_(std::move(sources)), poly_(std::move(poly)) {
    validate_sources();
    const Polynomial3 lap = poly_.laplacian();
    if (lap.max_abs_coeff() != 0.0)
      throw HarmonicityError("polynomial part is not harmonic: max |Laplacian coefficient| = " +
                             std::to_string(lap.max_abs_coeff()));
  }

  // Bypasses the harmonicity check; for planted-defect tests and for
  // deliberately non-harmonic deformation functions.
  static HarmonicPotential raw(double constant, std::vector<PointSource> sources,
                               Polynomial3 poly) {
    HarmonicPotential h;
    h.constant_ = constant;
    h.sources_ = std::move(sources);
    h.poly_ = std::move(poly);
    h.validate_sources();
    return h;
  }

  double constant_part() const { return constant_; }
  const std::vector<PointSource>& sources() const { return sources_; }
  const Polynomial3& poly() const { return poly_; }

  bool is_harmonic() const { return poly_.laplacian().max_abs_coeff() == 0.0; }
  double symbolic_laplacian_norm() const { return poly_.laplacian().max_abs_coeff(); }

  static constexpr double kExclusionRadius = 1e-7;

  Jet eval_jet(const SmallVec& p, int order) const {
    Jet j = poly_.eval(p, order);
    j.v += constant_;
    for (size_t k = 0; k < sources_.size(); ++k) {
      const PointSource& s = sources_[k];
      SmallVec u = SmallVec::zero(3);
      for (int i = 0; i < 3; ++i) u[i] = p[i] - s.center[static_cast<size_t>(i)];
      const double r2 = dot(u, u);
      const double r = std::sqrt(r2);
      if (r < kExclusionRadius)
        throw SingularityError("evaluation inside exclusion radius of source #" +
                                   std::to_string(k),
                               {p[0], p[1], p[2]});
      const double half_sigma = 0.5 * s.sigma;
      j.v += half_sigma / r;
      if (order >= 1) {
        const double gr = -half_sigma / (r2 * r);
        for (int i = 0; i < 3; ++i) j.g[i] += gr * u[i];
      }
      if (order >= 2) {
        const double hr = half_sigma / (r2 * r2 * r);
        for (int i = 0; i < 3; ++i)
          for (int l = 0; l < 3; ++l) j.hess(i, l) += hr * (3.0 * u[i] * u[l] - (i == l ? r2 : 0.0));
      }
    }
    return j;
  }

  double value(const std::array<double, 3>& p) const { return eval_jet(to_vec(p), 0).v; }

  std::array<double, 3> gradient(const std::array<double, 3>& p) const {
    const Jet j = eval_jet(to_vec(p), 1);
    return {j.g[0], j.g[1], j.g[2]};
  }

  std::array<std::array<double, 3>, 3> hessian(const std::array<double, 3>& p) const {
    const Jet j = eval_jet(to_vec(p), 2);
    std::array<std::array<double, 3>, 3> h{};
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l) h[static_cast<size_t>(i)][static_cast<size_t>(l)] = j.hess(i, l);
    return h;
  }

  double laplacian_residual(const std::array<double, 3>& p) const {
    const Jet j = eval_jet(to_vec(p), 2);
    return j.hess(0, 0) + j.hess(1, 1) + j.hess(2, 2);
  }

  // The potential as a scalar field on the R^3 chart.
  ScalarField as_field() const {
    HarmonicPotential self = *this;
    return ScalarField::from_jet(r3_chart(), 2, [self](const ChartPoint& p, int order) {
      return self.eval_jet(p.x, order);
    });
  }

  // The same function read off three coordinates of another chart.
  ScalarField field_on(const Chart& chart, const std::vector<int>& coord_map) const {
    return lift(chart, as_field(), coord_map);
  }

  // Pullback through a moment map given by three scalar fields.
  ScalarField compose_with(const std::array<ScalarField, 3>& mu) const {
    return pullback(as_field(), {mu[0], mu[1], mu[2]});
  }

  HarmonicPotential operator+(const HarmonicPotential& o) const {
    HarmonicPotential h;
    h.constant_ = constant_ + o.constant_;
    h.sources_ = sources_;
    h.sources_.insert(h.sources_.end(), o.sources_.begin(), o.sources_.end());
    Polynomial3 poly = poly_;
    for (const auto& [e, c] : o.poly_.terms()) poly.add(e[0], e[1], e[2], c);
    h.poly_ = poly;
    h.validate_sources();
    return h;
  }

 private:
  static SmallVec to_vec(const std::array<double, 3>& p) {
    SmallVec v = SmallVec::zero(3);
    for (int i = 0; i < 3; ++i) v[i] = p[static_cast<size_t>(i)];
    return v;
  }

  void validate_sources() const {
    for (const auto& s : sources_)
      if (s.sigma != 1 && s.sigma != -1)
        throw ConfigError("point source sigma must be +1 or -1");
    for (size_t i = 0; i < sources_.size(); ++i)
      for (size_t j = i + 1; j < sources_.size(); ++j) {
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double d = sources_[i].center[static_cast<size_t>(k)] -
                           sources_[j].center[static_cast<size_t>(k)];
          d2 += d * d;
        }
        if (d2 < 1e-9 * 1e-9)
          throw ConfigError("point source centers must be pairwise distinct (sources #" +
                            std::to_string(i) + ", #" + std::to_string(j) + ")");
      }
  }

  double constant_ = 0.0;
  std::vector<PointSource> sources_;
  Polynomial3 poly_;
};

}  // namespace hktl
