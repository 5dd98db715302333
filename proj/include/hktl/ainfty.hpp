#pragma once

// Certified truncation of an infinite source family with geometrically
// growing radii |p_i| = base * ratio^i along a fixed direction.  The kept
// prefix is chosen so an analytic bound on the dropped tail
//   sum_{i >= N} 1 / (2 (|p_i| - |q|))
// falls below the requested tolerance at the evaluation point q.

#include <optional>

#include "hktl/harmonic.hpp"

namespace hktl {

struct AInfinityFamily {
  std::array<double, 3> direction{1.0, 0.0, 0.0};
  double base_radius = 1.0;  // |p_0|
  double ratio = 2.0;        // |p_i| = base_radius * ratio^i
  std::optional<int> max_members;  // finite families degenerate gracefully
};

struct TruncationResult {
  HarmonicPotential potential;
  int kept = 0;
  double certified_tail_bound = 0.0;
};

inline TruncationResult truncate_a_infinity(const AInfinityFamily& family,
                                            const std::array<double, 3>& eval_point,
                                            double tail_bound) {
  if (tail_bound <= 0.0) throw ConfigError("tail bound must be positive");
  if (family.base_radius <= 0.0) throw ConfigError("family base radius must be positive");

  const double nd = std::sqrt(family.direction[0] * family.direction[0] +
                              family.direction[1] * family.direction[1] +
                              family.direction[2] * family.direction[2]);
  if (nd < 1e-12) throw ConfigError("family direction must be nonzero");
  const std::array<double, 3> dir{family.direction[0] / nd, family.direction[1] / nd,
                                  family.direction[2] / nd};

  const double R = std::sqrt(eval_point[0] * eval_point[0] + eval_point[1] * eval_point[1] +
                             eval_point[2] * eval_point[2]);

  auto build = [&](int kept, double bound) {
    std::vector<PointSource> sources;
    double r = family.base_radius;
    for (int i = 0; i < kept; ++i) {
      sources.push_back(PointSource{{r * dir[0], r * dir[1], r * dir[2]}, +1});
      r *= family.ratio;
    }
    return TruncationResult{HarmonicPotential(0.0, std::move(sources)), kept, bound};
  };

  if (family.max_members && *family.max_members <= 1) {
    if (family.max_members.value() < 1) throw ConfigError("family must have at least one member");
    return build(1, 0.0);  // a single point source, nothing dropped
  }
  if (!(family.ratio > 1.0))
    throw DivergenceRiskError("family radii must grow geometrically (ratio > 1)");

  constexpr int kMaxKept = 200;
  const int hard_cap = family.max_members ? std::min(*family.max_members, kMaxKept) : kMaxKept;

  for (int kept = 1; kept <= hard_cap; ++kept) {
    if (family.max_members && kept == *family.max_members) return build(kept, 0.0);
    // First dropped radius r_N; require r_N >= 2 |q| so each dropped term is
    // bounded by 1 / (2 r_i (1 - |q|/r_N)).
    const double rN = family.base_radius * std::pow(family.ratio, kept);
    if (rN < 2.0 * R) continue;
    const double tail_sum_inv_r = (1.0 / rN) * family.ratio / (family.ratio - 1.0);
    const double bound = 0.5 * tail_sum_inv_r / (1.0 - R / rN);
    if (bound < tail_bound) return build(kept, bound);
  }
  throw DivergenceRiskError(
      "evaluation point outside the guaranteed-convergence ball of the truncated family");
}

}  // namespace hktl
