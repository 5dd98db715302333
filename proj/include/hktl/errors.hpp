#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hktl {

// Every library error derives from Error so callers (notably the CLI, which
// maps evaluation errors to exit code 3) can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const { return "error"; }
  // Offending evaluation point, when the failure is tied to one.
  std::vector<double> point;
};

namespace detail {
inline std::string with_point(std::string msg, const std::vector<double>& p) {
  if (p.empty()) return msg;
  std::ostringstream os;
  os << msg << " at point (";
  for (size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}
}  // namespace detail

#define HKTL_DEFINE_ERROR(Name, tag)                                          \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what, std::vector<double> at = {})       \
        : Error(detail::with_point(what, at)) {                               \
      point = std::move(at);                                                  \
    }                                                                         \
    const char* kind() const override { return tag; }                         \
  }

HKTL_DEFINE_ERROR(ChartMismatchError, "chart-incompatibility");
HKTL_DEFINE_ERROR(EvaluationError, "evaluation");
HKTL_DEFINE_ERROR(DegeneracyError, "metric-degeneracy");
HKTL_DEFINE_ERROR(SpanViolationError, "span-violation");
HKTL_DEFINE_ERROR(SingularityError, "potential-singularity");
HKTL_DEFINE_ERROR(GaugeStringError, "gauge-string");
HKTL_DEFINE_ERROR(CapabilityError, "capability");
HKTL_DEFINE_ERROR(QuadratureHazardError, "quadrature-hazard");
HKTL_DEFINE_ERROR(DivergenceRiskError, "divergence-risk");
HKTL_DEFINE_ERROR(PositivityError, "potential-positivity");
HKTL_DEFINE_ERROR(GaugeError, "gauge-residual");
HKTL_DEFINE_ERROR(FixedPointError, "killing-fixed-point");
HKTL_DEFINE_ERROR(ZeroLocusError, "a-zero-locus");
HKTL_DEFINE_ERROR(HarmonicityError, "non-harmonic");
HKTL_DEFINE_ERROR(DegenerateMetricError, "deformation-degeneracy");
HKTL_DEFINE_ERROR(SamplingError, "sampling");
HKTL_DEFINE_ERROR(ExclusionError, "domain-exclusion");
HKTL_DEFINE_ERROR(InternalConsistencyError, "internal-consistency");
HKTL_DEFINE_ERROR(ConfigError, "config");
HKTL_DEFINE_ERROR(IoError, "io");

#undef HKTL_DEFINE_ERROR

}  // namespace hktl
