#pragma once

// Batch verification driver behind the CLI: builds the configured structure,
// dispatches the requested checks, and writes byte-stable reports.
// Exit codes: 0 all-pass, 1 check failure, 2 config error, 3 runtime numeric
// error, 4 I/O error.

#include <fstream>

#include "hktl/config.hpp"
#include "hktl/hkt.hpp"
#include "hktl/twist.hpp"

namespace hktl {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericError = 3;
inline constexpr int kExitIoError = 4;

namespace detail {

inline void append_report(ResidualReport& into, const ResidualReport& part) {
  const int offset = static_cast<int>(into.checks.size());
  for (const auto& c : part.checks) into.checks.push_back(c);
  for (const auto& pr : part.per_point) {
    PointResidual moved = pr;
    moved.check += offset;
    into.per_point.push_back(std::move(moved));
  }
}

struct BuiltStructure {
  StructureFields fields;
  std::optional<GHStructure> gh;
};

inline BuiltStructure build_structure(const JobConfig& cfg) {
  if (cfg.gh) {
    BuiltStructure b;
    b.gh = build_gh_structure(cfg.gh->potential.build(), cfg.gh->patch, cfg.gh->domain);
    b.fields = b.gh->fields;
    return b;
  }
  if (cfg.flat) {
    return BuiltStructure{build_flat_structure(cfg.flat->model, cfg.flat->domain), std::nullopt};
  }
  throw ConfigError("config has no structure section");
}

// Baseline checks for a flat structure: exact closedness of the triple and
// the moment-form identity; on a single weight-one block the norm-moment
// identity |X|^2 = 2 |mu| as well.
inline ResidualReport verify_flat_base(const StructureFields& f, const SampleSpec& spec,
                                       const Tolerances& tol, bool norm_moment_identity) {
  const auto pts = sample_points(f.chart, f.sample_box, spec, f.admissible);
  std::vector<CheckDef> checks;
  const char* names[3] = {"closedness_omega_I", "closedness_omega_J", "closedness_omega_K"};
  for (int A = 0; A < 3; ++A) {
    DifferentialForm d = ext_d(f.kahler[static_cast<size_t>(A)]);
    checks.push_back({names[A], "d(omega_A) = 0", tol.pde,
                      [d](const ChartPoint& p) { return d.sup_norm(p); }});
  }
  {
    std::array<DifferentialForm, 3> gaps{ext_d(f.moment_map[0]) - f.moment_forms[0],
                                         ext_d(f.moment_map[1]) - f.moment_forms[1],
                                         ext_d(f.moment_map[2]) - f.moment_forms[2]};
    checks.push_back({"moment_form_identity", "d(mu^A) = X into omega_A", tol.algebraic,
                      [gaps](const ChartPoint& p) {
                        return std::max({gaps[0].sup_norm(p), gaps[1].sup_norm(p),
                                         gaps[2].sup_norm(p)});
                      }});
  }
  if (norm_moment_identity) {
    auto mu = f.moment_map;
    auto n2 = f.killing_norm_sq;
    checks.push_back({"flat_norm_moment", "|X|^2 = 2 |mu|", 1e-12, [mu, n2](const ChartPoint& p) {
                        const double m0 = mu[0].value(p), m1 = mu[1].value(p), m2 = mu[2].value(p);
                        return std::abs(2.0 * std::sqrt(m0 * m0 + m1 * m1 + m2 * m2) -
                                        n2.value(p));
                      }});
  }
  ResidualReport report = run_residual_sweep(pts, checks, spec.seed);
  return report;
}

inline ResidualReport verify_inversion(const StructureFields& s, const HarmonicPotential& h,
                                       double lambda, const SampleSpec& spec) {
  const TwistData td = build_hk_twist_data(s, h, lambda, spec.eps_a);
  const InverseTwistData inv = invert_twist_data(s, h, lambda, spec.eps_a);
  const auto pts = sample_points(s.chart, s.sample_box, spec, twist_admissible(s, h, td));
  const ScalarField hf = deformation_field(s, h);
  const ScalarField h_gap = inv.h_check_rederived - ((-lambda * lambda) * hf);
  const ScalarField a_gap = td.a * inv.a_check - 1.0;
  const DifferentialForm f_gap = td.a * inv.curvature_check - td.curvature;
  std::vector<CheckDef> checks{
      {"inversion_rederived_h", "h' = -lambda^2 h", 1e-10,
       [h_gap](const ChartPoint& p) { return std::abs(h_gap.value(p)); }},
      {"inversion_involution_a", "a a' = 1", 1e-10,
       [a_gap](const ChartPoint& p) { return std::abs(a_gap.value(p)); }},
      {"inversion_curvature", "a F' = F", 1e-8,
       [f_gap](const ChartPoint& p) { return f_gap.sup_norm(p); }}};
  return run_residual_sweep(pts, checks, spec.seed);
}

}  // namespace detail

struct RunResult {
  ResidualReport report;
  int exit_code = kExitPass;
};

inline RunResult run_verify(const JobConfig& cfg) {
  detail::BuiltStructure built = detail::build_structure(cfg);
  const StructureFields& s = built.fields;
  const SampleSpec& spec = cfg.samples;

  ResidualReport report;
  report.seed = spec.seed;
  report.tolerances["algebraic"] = cfg.tolerances.algebraic;
  report.tolerances["pde"] = cfg.tolerances.pde;
  report.tolerances["fd"] = cfg.tolerances.fd;

  if (built.gh) {
    detail::append_report(report, verify_hyperkahler(*built.gh, spec, cfg.tolerances.pde));
  } else {
    const auto weights = cfg.flat->model.effective_weights();
    const bool weight_one_block = cfg.flat->model.n == 1 && weights[0] == 1;
    bool standard = true;
    for (int w : weights) standard = standard && w == 1;
    ResidualReport base = detail::verify_flat_base(s, spec, cfg.tolerances, weight_one_block);
    if (!standard)  // weighted diagonal actions are an extension of the standard model
      for (auto& c : base.checks) c.details["weighted_action_extension"] = 1.0;
    detail::append_report(report, base);
  }

  if (cfg.twist) {
    const HarmonicPotential h = cfg.twist->h.build();
    switch (cfg.twist->mode) {
      case TwistMode::Hk: {
        detail::append_report(report, verify_twist_hyperkahler(s, h, cfg.twist->lambda, spec));
        const TwistData td = build_hk_twist_data(s, h, cfg.twist->lambda, spec.eps_a);
        detail::append_report(report, verify_twist_data(s, td, h, spec));
        break;
      }
      case TwistMode::Modification: {
        detail::append_report(report, verify_twist_hyperkahler(s, h, -1.0, spec));
        if (built.gh) {
          // potential additivity: twisted norm = 1 / (V + V_N)
          const TwistData td = modification_data(s, h, spec.eps_a);
          const auto pts =
              sample_points(s.chart, s.sample_box, spec, twist_admissible(s, h, td));
          std::vector<CheckDef> checks{
              {"modification_additivity", "g~(X,X)/a^2 = 1/(V + V_N)", 1e-10,
               [&s, h](const ChartPoint& p) {
                 const double V = 1.0 / s.killing_norm_sq.value(p);
                 const double VN = h.value(s.moment_at(p));
                 return std::abs(twisted_killing_norm(s, h, -1.0, p) - 1.0 / (V + VN));
               }}};
          detail::append_report(report, run_residual_sweep(pts, checks, spec.seed));
        }
        const std::array<double, 3> p0 =
            h.sources().empty() ? std::array<double, 3>{0, 0, 0} : h.sources().front().center;
        detail::append_report(report, inverse_modification_feasible(s, p0, spec));
        break;
      }
      case TwistMode::Invert: {
        detail::append_report(report, detail::verify_inversion(s, h, cfg.twist->lambda, spec));
        break;
      }
    }
  }

  if (cfg.hkt) {
    const HarmonicPotential h = cfg.hkt->h.build();
    const HKTReport hr = strong_hkt_residuals(s, h, cfg.hkt->lambda, spec);
    detail::append_report(report, hr.report);
  }

  RunResult out;
  out.report = std::move(report);
  out.exit_code = out.report.all_pass() ? kExitPass : kExitCheckFailure;
  return out;
}

struct FluxResult {
  double flux = 0.0;
  long nearest = 0;
  double deviation = 0.0;
  bool pass = false;
};

inline FluxResult run_flux(const JobConfig& cfg) {
  if (!cfg.flux) throw ConfigError("config has no flux section");
  FluxResult r;
  r.flux = chern_flux(cfg.flux->potential.build(), cfg.flux->center, cfg.flux->radius,
                      cfg.flux->quadrature);
  r.nearest = std::lround(r.flux);
  r.deviation = std::abs(r.flux - static_cast<double>(r.nearest));
  r.pass = r.deviation <= 1e-3;
  return r;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed while writing '" + path + "'");
}

inline void write_outputs(const JobConfig& cfg, const ResidualReport& report) {
  if (cfg.report_path) write_text_file(*cfg.report_path, emit_report_json(report));
  if (cfg.csv_path) write_text_file(*cfg.csv_path, emit_report_csv(report));
}

}  // namespace hktl
