#pragma once

// Monopole gauge one-forms: a connection form omega with
// d(omega) = -*_3 dV for each potential term.  Point sources use the
// standard two-patch gauge written as
//   north: (sigma/2) (x dy - y dx) / (r (r + z))
//   south: -(sigma/2) (x dy - y dx) / (r (r - z))
// (coordinates relative to the source), which is singular exactly on the
// Dirac string and free of cancellation elsewhere.  Linear potential parts
// carry the closed-form gauge -(1/2) (l x p) . dp.

#include "hktl/forms.hpp"
#include "hktl/harmonic.hpp"

namespace hktl {

enum class Patch { North, South };

inline const char* patch_name(Patch p) { return p == Patch::North ? "north" : "south"; }

struct GaugeOneForm {
  PointSource source;
  Patch patch = Patch::North;
  DifferentialForm form;  // on the (x,y,z) chart
};

namespace detail {

// 1 / (r (r +- z)) relative to `center`, guarded against the Dirac string.
inline ScalarField gauge_denominator_inv(const Chart& chart, const std::array<double, 3>& center,
                                         Patch patch) {
  const double zsign = (patch == Patch::North) ? 1.0 : -1.0;
  return ScalarField::from_jet(chart, 2, [center, zsign](const ChartPoint& p, int order) {
    Jet ux = Jet::coordinate(3, order, 0, p[0] - center[0]);
    Jet uy = Jet::coordinate(3, order, 1, p[1] - center[1]);
    Jet uz = Jet::coordinate(3, order, 2, p[2] - center[2]);
    const double rho = std::hypot(ux.v, uy.v);
    if (rho < 1e-6 && zsign * uz.v <= 0.0)
      throw GaugeStringError("evaluation on the Dirac string (" +
                                 std::string(zsign > 0 ? "north" : "south") + " patch)",
                             p.coords_vec());
    Jet r = jet_sqrt(ux * ux + uy * uy + uz * uz);
    return jet_inv(r * (r + zsign * uz));
  });
}

}  // namespace detail

inline GaugeOneForm gauge_one_form(const PointSource& s, Patch patch) {
  const Chart& chart = r3_chart();
  const ScalarField inv_denom = detail::gauge_denominator_inv(chart, s.center, patch);
  const ScalarField ux = ScalarField::coordinate(chart, 0) - s.center[0];
  const ScalarField uy = ScalarField::coordinate(chart, 1) - s.center[1];
  const double half_sigma = 0.5 * s.sigma * (patch == Patch::North ? 1.0 : -1.0);
  const ScalarField cx = (-half_sigma) * (uy * inv_denom);
  const ScalarField cy = half_sigma * (ux * inv_denom);
  DifferentialForm form = DifferentialForm::from_components(
      chart, 1, {{MultiIndex::of({0}), cx}, {MultiIndex::of({1}), cy}});
  return GaugeOneForm{s, patch, std::move(form)};
}

// Gauge for the linear potential l.p: omega = -(1/2) (l x p) . dp.
inline DifferentialForm linear_gauge(const std::array<double, 3>& l) {
  const Chart& chart = r3_chart();
  const ScalarField x = ScalarField::coordinate(chart, 0);
  const ScalarField y = ScalarField::coordinate(chart, 1);
  const ScalarField z = ScalarField::coordinate(chart, 2);
  const ScalarField cx = -0.5 * (l[1] * z - l[2] * y);
  const ScalarField cy = -0.5 * (l[2] * x - l[0] * z);
  const ScalarField cz = -0.5 * (l[0] * y - l[1] * x);
  return DifferentialForm::from_components(chart, 1,
                                           {{MultiIndex::of({0}), cx},
                                            {MultiIndex::of({1}), cy},
                                            {MultiIndex::of({2}), cz}});
}

inline DifferentialForm potential_one_form(const HarmonicPotential& V, Patch patch) {
  if (V.poly().degree() > 1)
    throw CapabilityError(
        "no closed-form monopole gauge for harmonic polynomial parts of degree >= 2");
  std::array<double, 3> l{0.0, 0.0, 0.0};
  for (const auto& [e, c] : V.poly().terms()) {
    if (e[0] + e[1] + e[2] == 0) continue;  // constants need no gauge
    if (e[0] == 1) l[0] += c;
    if (e[1] == 1) l[1] += c;
    if (e[2] == 1) l[2] += c;
  }
  DifferentialForm omega = linear_gauge(l);
  for (const auto& s : V.sources()) omega = omega + gauge_one_form(s, patch).form;
  return omega;
}

// Re-indexes an R^3 form onto selected coordinates of another chart (the map
// must be increasing so index order is preserved).
inline DifferentialForm lift_form(const Chart& target, const DifferentialForm& form,
                                  const std::vector<int>& coord_map) {
  for (size_t k = 1; k < coord_map.size(); ++k)
    if (coord_map[k - 1] >= coord_map[k])
      throw ChartMismatchError("lift_form needs an increasing coordinate map");
  std::vector<std::pair<MultiIndex, ScalarField>> comps;
  for (size_t s = 0; s < form.indices().size(); ++s) {
    const MultiIndex& mi = form.indices()[s];
    MultiIndex mapped;
    for (int k = 0; k < mi.size(); ++k)
      mapped.idx[mapped.len++] = static_cast<std::uint8_t>(coord_map[static_cast<size_t>(mi[k])]);
    // Pick the coefficient through a single-slot adapter.
    ScalarField coeff = ScalarField::from_jet(
        form.chart(), 2, [form, s](const ChartPoint& p, int order) {
          return form.eval(p, order).c[s];
        });
    comps.emplace_back(mapped, lift(target, coeff, coord_map));
  }
  return DifferentialForm::from_components(target, form.degree(), std::move(comps));
}

}  // namespace hktl
