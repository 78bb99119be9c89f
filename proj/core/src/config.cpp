#include "fiberspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fiberspec {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Validator {
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
  }

  const json* object(const json& obj, const std::string& path, const std::string& key,
                     bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required object");
      return nullptr;
    }
    if (!obj[key].is_object()) {
      fail(path + "." + key, "must be an object");
      return nullptr;
    }
    return &obj[key];
  }

  std::optional<double> number(const json& obj, const std::string& path, const std::string& key,
                               bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required number");
      return std::nullopt;
    }
    if (!obj[key].is_number()) {
      fail(path + "." + key, "must be a number");
      return std::nullopt;
    }
    return obj[key].get<double>();
  }

  std::optional<long> integer(const json& obj, const std::string& path, const std::string& key,
                              bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required integer");
      return std::nullopt;
    }
    if (!obj[key].is_number_integer()) {
      fail(path + "." + key, "must be an integer");
      return std::nullopt;
    }
    return obj[key].get<long>();
  }

  std::optional<std::string> text(const json& obj, const std::string& path, const std::string& key,
                                  bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required string");
      return std::nullopt;
    }
    if (!obj[key].is_string()) {
      fail(path + "." + key, "must be a string");
      return std::nullopt;
    }
    return obj[key].get<std::string>();
  }
};

std::optional<FiberProfile> parse_profile(Validator& v, const json& obj, const std::string& path,
                                          double base_period, bool constant_only) {
  v.check_keys(obj, path, {"constant", "harmonics"});
  FiberProfile p;
  p.base_period = base_period;
  auto c = v.number(obj, path, "constant", true);
  if (c) p.constant = *c;
  if (obj.contains("harmonics")) {
    if (!obj["harmonics"].is_array()) {
      v.fail(path + ".harmonics", "must be an array");
      return std::nullopt;
    }
    int idx = 0;
    for (const auto& h : obj["harmonics"]) {
      std::ostringstream hp;
      hp << path << ".harmonics[" << idx++ << "]";
      if (!h.is_object()) {
        v.fail(hp.str(), "must be an object");
        continue;
      }
      v.check_keys(h, hp.str(), {"frequency", "cos", "sin"});
      FiberProfile::Harmonic out;
      auto f = v.integer(h, hp.str(), "frequency", true);
      if (f) {
        if (*f < 1)
          v.fail(hp.str() + ".frequency", "must be >= 1");
        else
          out.frequency = static_cast<int>(*f);
      }
      if (auto cc = v.number(h, hp.str(), "cos", false)) out.cos_coeff = *cc;
      if (auto ss = v.number(h, hp.str(), "sin", false)) out.sin_coeff = *ss;
      p.harmonics.push_back(out);
    }
  }
  if (constant_only && p.max_frequency() != 0)
    v.fail(path, "this geometry supports a constant profile only");
  return p;
}

std::string rule_name(CollapseRule r) {
  return r == CollapseRule::ScaleAmplitude ? "scale_amplitude" : "scale_amplitude_and_frequency";
}

std::string geometry_name(GeometryType t) {
  switch (t) {
    case GeometryType::FlatTorus: return "flat_torus";
    case GeometryType::WarpedTorus: return "warped_torus";
    case GeometryType::FluxBundle: return "flux_bundle";
  }
  return {};
}

json profile_echo(const FiberProfile& p) {
  json harmonics = json::array();
  for (const auto& h : p.harmonics)
    harmonics.push_back({{"frequency", h.frequency}, {"cos", h.cos_coeff}, {"sin", h.sin_coeff}});
  return {{"constant", p.constant}, {"harmonics", harmonics}};
}

json build_echo(const ExperimentConfig& c) {
  json geometry;
  geometry["type"] = geometry_name(c.type);
  switch (c.type) {
    case GeometryType::FlatTorus:
      geometry["periods"] = {c.period_base, c.period_fiber};
      geometry["holonomy"] = c.holonomy;
      break;
    case GeometryType::WarpedTorus:
      geometry["base_length"] = c.base_length;
      geometry["profile"] = profile_echo(c.profile);
      geometry["holonomy"] = c.holonomy;
      break;
    case GeometryType::FluxBundle:
      geometry["periods"] = {c.torus_x, c.torus_y};
      geometry["flux"] = c.flux;
      geometry["profile"] = profile_echo(c.profile);
      break;
  }

  json solver;
  if (c.solver.grid_auto)
    solver["grid"] = "auto";
  else
    solver["grid"] = c.solver.grid;
  if (c.solver.cutoff_auto)
    solver["cutoff"] = "auto";
  else
    solver["cutoff"] = c.solver.cutoff;
  solver["k_range"] = {c.solver.k_lo, c.solver.k_hi};
  solver["j_count"] = c.solver.j_count;
  solver["tolerance_closed_form"] = c.solver.tolerance_closed_form;
  solver["tolerance_discretized"] = c.solver.tolerance_discretized;
  solver["epsilon"] = c.solver.epsilon;

  json checks = json::array();
  for (CheckKind k : c.checks) checks.push_back(check_name(k));

  return {{"geometry", geometry},
          {"spin", {{"fiber", c.projectable ? "projectable" : "nonprojectable"},
                    {"base_twists", c.base_twists}}},
          {"collapse", {{"rule", rule_name(c.rule)}, {"stages", c.stages}}},
          {"solver", solver},
          {"checks", checks}};
}

}  // namespace

std::string check_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::Thm1Lower: return "thm1_lower";
    case CheckKind::Thm1Upper: return "thm1_upper";
    case CheckKind::Thm1Convergence: return "thm1_convergence";
    case CheckKind::Thm2: return "thm2";
    case CheckKind::Thm3: return "thm3";
  }
  return {};
}

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome outcome;
  json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) {
    outcome.errors.push_back("config: not valid JSON");
    return outcome;
  }
  if (!root.is_object()) {
    outcome.errors.push_back("config: top level must be an object");
    return outcome;
  }

  Validator v;
  v.check_keys(root, "config", {"geometry", "spin", "collapse", "solver", "checks"});

  ExperimentConfig c;

  // geometry
  if (const json* g = v.object(root, "config", "geometry", true)) {
    auto type = v.text(*g, "geometry", "type", true);
    if (type) {
      if (*type == "flat_torus")
        c.type = GeometryType::FlatTorus;
      else if (*type == "warped_torus")
        c.type = GeometryType::WarpedTorus;
      else if (*type == "flux_bundle")
        c.type = GeometryType::FluxBundle;
      else
        v.fail("geometry.type", "must be flat_torus, warped_torus or flux_bundle");
    }
    if (type && *type == "flat_torus") {
      v.check_keys(*g, "geometry", {"type", "periods", "holonomy"});
      if (!g->contains("periods") || !(*g)["periods"].is_array() || (*g)["periods"].size() != 2) {
        v.fail("geometry.periods", "flat_torus needs periods [base, fiber]");
      } else {
        const auto& p = (*g)["periods"];
        if (!p[0].is_number() || !p[1].is_number()) {
          v.fail("geometry.periods", "entries must be numbers");
        } else {
          c.period_base = p[0].get<double>();
          c.period_fiber = p[1].get<double>();
          if (!(c.period_base > 0.0) || !(c.period_fiber > 0.0))
            v.fail("geometry.periods", "periods must be positive");
        }
      }
      if (auto h = v.number(*g, "geometry", "holonomy", false))
        c.holonomy = std::fmod(std::fmod(*h, kTwoPi) + kTwoPi, kTwoPi);
    } else if (type && *type == "warped_torus") {
      v.check_keys(*g, "geometry", {"type", "base_length", "profile", "holonomy"});
      if (auto a = v.number(*g, "geometry", "base_length", true)) {
        c.base_length = *a;
        if (!(c.base_length > 0.0)) v.fail("geometry.base_length", "must be positive");
      }
      if (const json* p = v.object(*g, "geometry", "profile", true)) {
        if (auto prof = parse_profile(v, *p, "geometry.profile", c.base_length, false))
          c.profile = *prof;
      }
      if (auto h = v.number(*g, "geometry", "holonomy", false))
        c.holonomy = std::fmod(std::fmod(*h, kTwoPi) + kTwoPi, kTwoPi);
    } else if (type && *type == "flux_bundle") {
      v.check_keys(*g, "geometry", {"type", "periods", "flux", "profile"});
      if (!g->contains("periods") || !(*g)["periods"].is_array() || (*g)["periods"].size() != 2) {
        v.fail("geometry.periods", "flux_bundle needs base torus periods [x, y]");
      } else {
        const auto& p = (*g)["periods"];
        if (!p[0].is_number() || !p[1].is_number()) {
          v.fail("geometry.periods", "entries must be numbers");
        } else {
          c.torus_x = p[0].get<double>();
          c.torus_y = p[1].get<double>();
          if (!(c.torus_x > 0.0) || !(c.torus_y > 0.0))
            v.fail("geometry.periods", "periods must be positive");
        }
      }
      if (auto f = v.integer(*g, "geometry", "flux", true)) {
        c.flux = *f;
        if (c.flux == 0) v.fail("geometry.flux", "must be nonzero");
      }
      if (const json* p = v.object(*g, "geometry", "profile", true)) {
        if (auto prof = parse_profile(v, *p, "geometry.profile", 1.0, true)) c.profile = *prof;
      }
    }
  }

  const int base_dim = (c.type == GeometryType::FluxBundle) ? 2 : 1;

  // spin
  if (const json* s = v.object(root, "config", "spin", true)) {
    v.check_keys(*s, "spin", {"fiber", "base_twists"});
    if (auto fiber = v.text(*s, "spin", "fiber", true)) {
      if (*fiber == "projectable")
        c.projectable = true;
      else if (*fiber == "nonprojectable")
        c.projectable = false;
      else
        v.fail("spin.fiber", "must be projectable or nonprojectable");
    }
    if (s->contains("base_twists")) {
      if (!(*s)["base_twists"].is_array()) {
        v.fail("spin.base_twists", "must be an array");
      } else {
        for (const auto& t : (*s)["base_twists"]) {
          if (!t.is_number() || (t.get<double>() != 0.0 && t.get<double>() != 0.5))
            v.fail("spin.base_twists", "entries must be 0 or 0.5");
          else
            c.base_twists.push_back(t.get<double>());
        }
        if (static_cast<int>(c.base_twists.size()) != base_dim)
          v.fail("spin.base_twists", "need exactly " + std::to_string(base_dim) +
                                         " entries for this base");
      }
    }
  }
  if (c.base_twists.empty()) c.base_twists.assign(base_dim, 0.0);

  // collapse
  if (root.contains("collapse")) {
    if (const json* cl = v.object(root, "config", "collapse", false)) {
      v.check_keys(*cl, "collapse", {"rule", "stages"});
      if (auto r = v.text(*cl, "collapse", "rule", false)) {
        if (*r == "scale_amplitude")
          c.rule = CollapseRule::ScaleAmplitude;
        else if (*r == "scale_amplitude_and_frequency")
          c.rule = CollapseRule::ScaleAmplitudeAndFrequency;
        else
          v.fail("collapse.rule", "must be scale_amplitude or scale_amplitude_and_frequency");
      }
      if (cl->contains("stages")) {
        if (!(*cl)["stages"].is_array() || (*cl)["stages"].empty()) {
          v.fail("collapse.stages", "must be a non-empty array of integers");
        } else {
          c.stages.clear();
          long prev = 0;
          for (const auto& n : (*cl)["stages"]) {
            if (!n.is_number_integer() || n.get<long>() < 1) {
              v.fail("collapse.stages", "entries must be integers >= 1");
              break;
            }
            if (n.get<long>() <= prev) {
              v.fail("collapse.stages", "entries must be strictly increasing");
              break;
            }
            prev = n.get<long>();
            c.stages.push_back(static_cast<int>(prev));
          }
          if (c.stages.empty()) c.stages = {1};
        }
      }
    }
  }

  // solver
  if (root.contains("solver")) {
    if (const json* s = v.object(root, "config", "solver", false)) {
      v.check_keys(*s, "solver",
                   {"grid", "k_range", "j_count", "cutoff", "tolerance_closed_form",
                    "tolerance_discretized", "epsilon"});
      if (s->contains("grid")) {
        const auto& gr = (*s)["grid"];
        if (gr.is_string() && gr.get<std::string>() == "auto") {
          c.solver.grid_auto = true;
        } else if (gr.is_number_integer()) {
          c.solver.grid = static_cast<int>(gr.get<long>());
          if (c.solver.grid < 8 || c.solver.grid % 2 != 0)
            v.fail("solver.grid", "must be an even integer >= 8 (or \"auto\")");
        } else {
          v.fail("solver.grid", "must be an even integer or \"auto\"");
        }
      }
      if (s->contains("k_range")) {
        const auto& kr = (*s)["k_range"];
        if (!kr.is_array() || kr.size() != 2 || !kr[0].is_number() || !kr[1].is_number()) {
          v.fail("solver.k_range", "must be [lo, hi]");
        } else {
          c.solver.k_lo = kr[0].get<double>();
          c.solver.k_hi = kr[1].get<double>();
          if (c.solver.k_lo > c.solver.k_hi) v.fail("solver.k_range", "lo must be <= hi");
        }
      }
      if (auto j = v.integer(*s, "solver", "j_count", false)) {
        c.solver.j_count = static_cast<int>(*j);
        if (c.solver.j_count < 1) v.fail("solver.j_count", "must be >= 1");
      }
      if (s->contains("cutoff")) {
        const auto& co = (*s)["cutoff"];
        if (co.is_string() && co.get<std::string>() == "auto") {
          c.solver.cutoff_auto = true;
        } else if (co.is_number()) {
          c.solver.cutoff = co.get<double>();
          c.solver.cutoff_auto = false;
          if (!(c.solver.cutoff > 0.0)) v.fail("solver.cutoff", "must be positive");
        } else {
          v.fail("solver.cutoff", "must be a number or \"auto\"");
        }
      }
      if (auto t = v.number(*s, "solver", "tolerance_closed_form", false)) {
        c.solver.tolerance_closed_form = *t;
        if (!(*t > 0.0)) v.fail("solver.tolerance_closed_form", "must be positive");
      }
      if (auto t = v.number(*s, "solver", "tolerance_discretized", false)) {
        c.solver.tolerance_discretized = *t;
        if (!(*t > 0.0)) v.fail("solver.tolerance_discretized", "must be positive");
      }
      if (auto e = v.number(*s, "solver", "epsilon", false)) {
        c.solver.epsilon = *e;
        if (*e < 0.0) v.fail("solver.epsilon", "must be >= 0");
      }
    }
  }

  // checks
  if (root.contains("checks")) {
    if (!root["checks"].is_array()) {
      v.fail("checks", "must be an array");
    } else {
      for (const auto& ch : root["checks"]) {
        if (!ch.is_string()) {
          v.fail("checks", "entries must be strings");
          continue;
        }
        const std::string name = ch.get<std::string>();
        if (name == "thm1_lower")
          c.checks.push_back(CheckKind::Thm1Lower);
        else if (name == "thm1_upper")
          c.checks.push_back(CheckKind::Thm1Upper);
        else if (name == "thm1_convergence")
          c.checks.push_back(CheckKind::Thm1Convergence);
        else if (name == "thm2")
          c.checks.push_back(CheckKind::Thm2);
        else if (name == "thm3")
          c.checks.push_back(CheckKind::Thm3);
        else
          v.fail("checks", "unknown check \"" + name + "\"");
      }
    }
  }

  // cross-field rules
  for (CheckKind k : c.checks) {
    const bool needs_projectable = (k == CheckKind::Thm1Lower || k == CheckKind::Thm1Convergence);
    const bool needs_nonprojectable = (k == CheckKind::Thm2 || k == CheckKind::Thm3);
    if (needs_projectable && !c.projectable)
      v.fail("checks", check_name(k) + " requires spin.fiber = projectable");
    if (needs_nonprojectable && c.projectable)
      v.fail("checks", check_name(k) + " requires spin.fiber = nonprojectable");
  }
  const bool asymptotic =
      std::any_of(c.checks.begin(), c.checks.end(), [](CheckKind k) {
        return k != CheckKind::Thm3;
      });
  if (asymptotic && c.stages.size() < 2)
    v.fail("collapse.stages", "asymptotic checks need at least 2 stages");

  // resolution rule: a fixed grid must resolve every stage profile
  if (!c.solver.grid_auto && c.type == GeometryType::WarpedTorus && v.errors.empty()) {
    int required = 0;
    for (int n : c.stages) {
      const int mf = c.profile.max_frequency() *
                     (c.rule == CollapseRule::ScaleAmplitudeAndFrequency ? n : 1);
      required = std::max(required, 8 * mf);
    }
    if (required % 2 != 0) ++required;
    if (c.solver.grid < required) {
      std::ostringstream msg;
      msg << "grid under-resolves the profile: required G >= " << required << ", got "
          << c.solver.grid;
      v.fail("solver.grid", msg.str());
    }
  }

  if (!v.errors.empty()) {
    outcome.errors = std::move(v.errors);
    return outcome;
  }

  c.echo_json = build_echo(c).dump(2);
  outcome.config = std::move(c);
  return outcome;
}

BundleGeometry make_stage_geometry(const ExperimentConfig& config, int stage) {
  if (stage < 1) throw std::invalid_argument("make_stage_geometry: stage must be >= 1");
  BundleGeometry g;
  switch (config.type) {
    case GeometryType::FlatTorus: {
      g.base = CircleBase{config.period_base};
      g.profile.base_period = config.period_base;
      g.profile.constant = config.period_fiber / stage;
      g.fiber_convention = FiberConvention::FiberPeriod;
      g.connection.holonomy = {config.holonomy};
      g.spin = {config.projectable, config.base_twists};
      break;
    }
    case GeometryType::WarpedTorus: {
      g.base = CircleBase{config.base_length};
      FiberProfile p = config.profile;
      p.base_period = config.base_length;
      if (config.rule == CollapseRule::ScaleAmplitudeAndFrequency)
        p = p.frequency_scaled(stage);
      g.profile = p.scaled(1.0 / stage);
      g.fiber_convention = FiberConvention::KillingNorm;
      g.connection.holonomy = {config.holonomy};
      g.spin = {config.projectable, config.base_twists};
      break;
    }
    case GeometryType::FluxBundle: {
      g.base = TorusBase{config.torus_x, config.torus_y};
      g.profile.base_period = 1.0;
      g.profile.constant = config.profile.constant / stage;
      g.fiber_convention = FiberConvention::KillingNorm;
      const double area = config.torus_x * config.torus_y;
      g.connection.holonomy = {0.0, 0.0};
      g.connection.curvature = {{0, 1, kTwoPi * config.flux / area}};
      g.connection.euler_numbers = {config.flux};
      g.spin = {config.projectable, config.base_twists};
      break;
    }
  }
  g.validate();
  return g;
}

CollapseFamily make_family(const ExperimentConfig& config) {
  CollapseFamily family;
  for (int n : config.stages) {
    family.stages.push_back(make_stage_geometry(config, n));
    family.stage_labels.push_back(n);
  }
  return family;
}

int stage_grid(const ExperimentConfig& config, int stage) {
  if (!config.solver.grid_auto) return config.solver.grid;
  int mf = config.profile.max_frequency();
  if (config.type == GeometryType::WarpedTorus &&
      config.rule == CollapseRule::ScaleAmplitudeAndFrequency)
    mf *= stage;
  int g = std::max(16, 8 * mf);
  if (g % 2 != 0) ++g;
  return g;
}

}  // namespace fiberspec
