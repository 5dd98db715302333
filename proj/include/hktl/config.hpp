#pragma once

// JSON job configuration: structure spec (GH or flat), twist/HKT spec,
// sampling, tolerances and output paths.  Parsing normalizes the config so
// emit(parse(x)) round-trips structurally.

#include <optional>
#include <string>

#include <json.hpp>

#include "hktl/flat_models.hpp"
#include "hktl/flux.hpp"
#include "hktl/gibbons_hawking.hpp"

namespace hktl {

struct PotentialSpec {
  double constant = 0.0;
  std::vector<PointSource> sources;
  std::map<std::string, double> poly;  // canonical monomial keys over {x,y,z}

  HarmonicPotential build() const {
    Polynomial3 p;
    for (const auto& [mono, coeff] : poly) {
      int e[3] = {0, 0, 0};
      for (char c : mono) {
        if (c == 'x') ++e[0];
        else if (c == 'y') ++e[1];
        else if (c == 'z') ++e[2];
        else throw ConfigError("polynomial monomial keys use characters x, y, z only");
      }
      p.add(e[0], e[1], e[2], coeff);
    }
    try {
      return HarmonicPotential(constant, sources, p);
    } catch (const HarmonicityError& e) {
      throw ConfigError(std::string("potential spec: ") + e.what());
    }
  }
};

struct GHSpec {
  PotentialSpec potential;
  Patch patch = Patch::North;
  GHDomain domain;
};

struct FlatSpec {
  FlatModel model;
  FlatDomain domain;
};

enum class TwistMode { Hk, Modification, Invert };

struct TwistSpec {
  PotentialSpec h;
  double lambda = -1.0;
  TwistMode mode = TwistMode::Hk;
};

struct HktSpec {
  PotentialSpec h;
  double lambda = 1.0;
};

struct FluxSpec {
  PotentialSpec potential;
  std::array<double, 3> center{0, 0, 0};
  double radius = 1.0;
  QuadratureSpec quadrature;
};

struct Tolerances {
  double algebraic = 1e-10;
  double pde = 1e-6;
  double fd = 1e-5;
};

struct JobConfig {
  std::optional<GHSpec> gh;
  std::optional<FlatSpec> flat;
  std::optional<TwistSpec> twist;
  std::optional<HktSpec> hkt;
  std::optional<FluxSpec> flux;
  SampleSpec samples;
  Tolerances tolerances;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_path;
};

namespace detail {

using json = nlohmann::json;

inline std::string canonical_monomial(const std::string& key) {
  std::string s = key;
  std::sort(s.begin(), s.end());
  return s;
}

inline PotentialSpec parse_potential(const json& j) {
  PotentialSpec p;
  if (!j.is_object()) throw ConfigError("potential spec must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "constant") {
      p.constant = val.get<double>();
    } else if (key == "sources") {
      for (const auto& s : val) {
        PointSource src;
        const auto c = s.at("center");
        if (!c.is_array() || c.size() != 3)
          throw ConfigError("source center must be a 3-vector");
        for (int i = 0; i < 3; ++i) src.center[static_cast<size_t>(i)] = c[static_cast<size_t>(i)].get<double>();
        src.sigma = s.at("sigma").get<int>();
        p.sources.push_back(src);
      }
    } else if (key == "poly") {
      for (const auto& [mono, coeff] : val.items())
        p.poly[canonical_monomial(mono)] += coeff.get<double>();
    } else {
      throw ConfigError("unknown potential key '" + key + "'");
    }
  }
  return p;
}

inline json emit_potential(const PotentialSpec& p) {
  json j = json::object();
  j["constant"] = p.constant;
  json sources = json::array();
  for (const auto& s : p.sources)
    sources.push_back(json{{"center", {s.center[0], s.center[1], s.center[2]}},
                           {"sigma", s.sigma}});
  j["sources"] = sources;
  json poly = json::object();
  for (const auto& [mono, coeff] : p.poly) poly[mono] = coeff;
  j["poly"] = poly;
  return j;
}

inline void line_col_of(const std::string& text, size_t byte, int& line, int& col) {
  line = 1;
  col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

}  // namespace detail

inline JobConfig parse_job_config(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 0, col = 0;
    detail::line_col_of(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    throw ConfigError("JSON parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }

  JobConfig cfg;
  try {
    if (j.contains("structure")) {
      const auto& s = j.at("structure");
      if (s.contains("gh")) {
        GHSpec gh;
        const auto& g = s.at("gh");
        gh.potential = detail::parse_potential(g.at("potential"));
        if (g.contains("patch")) {
          const std::string p = g.at("patch").get<std::string>();
          if (p == "north") gh.patch = Patch::North;
          else if (p == "south") gh.patch = Patch::South;
          else throw ConfigError("patch must be 'north' or 'south'");
        }
        if (g.contains("domain")) {
          const auto& d = g.at("domain");
          if (d.contains("box")) {
            const auto& b = d.at("box");
            if (!b.is_array() || b.size() != 3) throw ConfigError("domain box must have 3 ranges");
            for (int i = 0; i < 3; ++i) {
              gh.domain.box[static_cast<size_t>(i)][0] = b[static_cast<size_t>(i)][0].get<double>();
              gh.domain.box[static_cast<size_t>(i)][1] = b[static_cast<size_t>(i)][1].get<double>();
            }
          }
          if (d.contains("r_excl")) gh.domain.r_excl = d.at("r_excl").get<double>();
          if (d.contains("r_axis")) gh.domain.r_axis = d.at("r_axis").get<double>();
        }
        cfg.gh = gh;
      }
      if (s.contains("flat")) {
        FlatSpec flat;
        const auto& f = s.at("flat");
        flat.model.n = f.at("n").get<int>();
        if (f.contains("weights")) flat.model.weights = f.at("weights").get<std::vector<int>>();
        if (f.contains("half_width")) flat.domain.half_width = f.at("half_width").get<double>();
        if (f.contains("r_fixed")) flat.domain.r_fixed = f.at("r_fixed").get<double>();
        cfg.flat = flat;
      }
      if (cfg.gh && cfg.flat) throw ConfigError("structure must be gh or flat, not both");
    }
    if (j.contains("twist")) {
      TwistSpec t;
      const auto& tw = j.at("twist");
      t.h = detail::parse_potential(tw.at("h"));
      if (tw.contains("lambda")) t.lambda = tw.at("lambda").get<double>();
      if (tw.contains("mode")) {
        const std::string m = tw.at("mode").get<std::string>();
        if (m == "hk") t.mode = TwistMode::Hk;
        else if (m == "modification") t.mode = TwistMode::Modification;
        else if (m == "invert") t.mode = TwistMode::Invert;
        else throw ConfigError("twist mode must be hk, modification or invert");
      }
      cfg.twist = t;
    }
    if (j.contains("hkt")) {
      HktSpec h;
      const auto& hk = j.at("hkt");
      h.h = detail::parse_potential(hk.at("h"));
      if (hk.contains("lambda")) h.lambda = hk.at("lambda").get<double>();
      cfg.hkt = h;
    }
    if (cfg.twist && cfg.hkt) throw ConfigError("specify twist or hkt, not both");
    if (j.contains("flux")) {
      FluxSpec f;
      const auto& fl = j.at("flux");
      f.potential = detail::parse_potential(fl.at("potential"));
      if (fl.contains("center")) {
        const auto& c = fl.at("center");
        for (int i = 0; i < 3; ++i) f.center[static_cast<size_t>(i)] = c[static_cast<size_t>(i)].get<double>();
      }
      f.radius = fl.at("radius").get<double>();
      if (fl.contains("polar_nodes")) f.quadrature.polar_nodes = fl.at("polar_nodes").get<int>();
      if (fl.contains("azimuth_nodes"))
        f.quadrature.azimuth_nodes = fl.at("azimuth_nodes").get<int>();
      cfg.flux = f;
    }
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      if (s.contains("seed")) cfg.samples.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("count")) cfg.samples.count = s.at("count").get<int>();
      if (s.contains("eps_a")) cfg.samples.eps_a = s.at("eps_a").get<double>();
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (t.contains("algebraic")) cfg.tolerances.algebraic = t.at("algebraic").get<double>();
      if (t.contains("pde")) cfg.tolerances.pde = t.at("pde").get<double>();
      if (t.contains("fd")) cfg.tolerances.fd = t.at("fd").get<double>();
    }
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      if (o.contains("report")) cfg.report_path = o.at("report").get<std::string>();
      if (o.contains("csv")) cfg.csv_path = o.at("csv").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.tolerances.algebraic <= 0 || cfg.tolerances.pde <= 0 || cfg.tolerances.fd <= 0)
    throw ConfigError("tolerances must be positive");
  if (cfg.samples.count < 1) throw ConfigError("sample count must be >= 1");
  if (cfg.samples.eps_a <= 0) throw ConfigError("eps_a must be positive");
  // Potential specs must construct (harmonicity, distinct centers, sigma).
  if (cfg.gh) cfg.gh->potential.build();
  if (cfg.twist) cfg.twist->h.build();
  if (cfg.hkt) cfg.hkt->h.build();
  if (cfg.flux) cfg.flux->potential.build();
  return cfg;
}

inline nlohmann::json emit_job_config(const JobConfig& cfg) {
  using detail::json;
  json j = json::object();
  if (cfg.gh || cfg.flat) {
    json s = json::object();
    if (cfg.gh) {
      json g = json::object();
      g["potential"] = detail::emit_potential(cfg.gh->potential);
      g["patch"] = cfg.gh->patch == Patch::North ? "north" : "south";
      g["domain"] = json{{"box",
                          {{cfg.gh->domain.box[0][0], cfg.gh->domain.box[0][1]},
                           {cfg.gh->domain.box[1][0], cfg.gh->domain.box[1][1]},
                           {cfg.gh->domain.box[2][0], cfg.gh->domain.box[2][1]}}},
                         {"r_excl", cfg.gh->domain.r_excl},
                         {"r_axis", cfg.gh->domain.r_axis}};
      s["gh"] = g;
    }
    if (cfg.flat) {
      json f = json::object();
      f["n"] = cfg.flat->model.n;
      f["weights"] = cfg.flat->model.effective_weights();
      f["half_width"] = cfg.flat->domain.half_width;
      f["r_fixed"] = cfg.flat->domain.r_fixed;
      s["flat"] = f;
    }
    j["structure"] = s;
  }
  if (cfg.twist) {
    j["twist"] = json{{"h", detail::emit_potential(cfg.twist->h)},
                      {"lambda", cfg.twist->lambda},
                      {"mode", cfg.twist->mode == TwistMode::Hk
                                   ? "hk"
                                   : (cfg.twist->mode == TwistMode::Modification ? "modification"
                                                                                 : "invert")}};
  }
  if (cfg.hkt)
    j["hkt"] = json{{"h", detail::emit_potential(cfg.hkt->h)}, {"lambda", cfg.hkt->lambda}};
  if (cfg.flux)
    j["flux"] = json{{"potential", detail::emit_potential(cfg.flux->potential)},
                     {"center", {cfg.flux->center[0], cfg.flux->center[1], cfg.flux->center[2]}},
                     {"radius", cfg.flux->radius},
                     {"polar_nodes", cfg.flux->quadrature.polar_nodes},
                     {"azimuth_nodes", cfg.flux->quadrature.azimuth_nodes}};
  j["samples"] = json{{"seed", cfg.samples.seed},
                      {"count", cfg.samples.count},
                      {"eps_a", cfg.samples.eps_a}};
  j["tolerances"] = json{{"algebraic", cfg.tolerances.algebraic},
                         {"pde", cfg.tolerances.pde},
                         {"fd", cfg.tolerances.fd}};
  if (cfg.report_path || cfg.csv_path) {
    json o = json::object();
    if (cfg.report_path) o["report"] = *cfg.report_path;
    if (cfg.csv_path) o["csv"] = *cfg.csv_path;
    j["outputs"] = o;
  }
  return j;
}

}  // namespace hktl
