#pragma once

// Seeded, reproducible point sampling.  The generator is the standard
// mt19937_64 (constants fixed by the C++ standard); doubles are produced by
// the explicit 53-bit mapping below rather than a distribution object, so
// streams are identical across standard libraries.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hktl/chart.hpp"
#include "hktl/errors.hpp"

namespace hktl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

struct SampleSpec {
  std::uint64_t seed = 1;
  int count = 1000;
  double eps_a = 1e-4;  // excluded zero-locus margin for twist sweeps
};

using Box = std::vector<std::array<double, 2>>;

inline std::vector<ChartPoint> sample_points(
    const Chart& chart, const Box& box, const SampleSpec& spec,
    const std::function<bool(const ChartPoint&)>& admissible) {
  if (spec.count < 1) throw SamplingError("sample count must be >= 1");
  if (static_cast<int>(box.size()) != chart.dim)
    throw SamplingError("sample box rank does not match chart dimension");
  Rng rng(spec.seed);
  std::vector<ChartPoint> out;
  out.reserve(static_cast<size_t>(spec.count));
  const long max_attempts = 1000L * spec.count;
  long attempts = 0;
  while (static_cast<int>(out.size()) < spec.count) {
    if (++attempts > max_attempts)
      throw SamplingError("no admissible points found in sample box (rejection budget exhausted)");
    SmallVec x = SmallVec::zero(chart.dim);
    for (int i = 0; i < chart.dim; ++i) x[i] = rng.uniform(box[static_cast<size_t>(i)][0],
                                                           box[static_cast<size_t>(i)][1]);
    ChartPoint p(chart, x);
    if (!admissible || admissible(p)) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace hktl
