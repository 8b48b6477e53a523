#include "lgkit/scenario.hpp"

#include "lgkit/algebroid.hpp"
#include "lgkit/builtins.hpp"
#include "lgkit/foliation.hpp"
#include "lgkit/linearize.hpp"
#include "lgkit/nerve.hpp"
#include "lgkit/nmetric.hpp"

#include "toml.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lgkit {

namespace {

const std::vector<std::string> kChecks = {"axioms",      "simplicial",    "n-metric",  "normal-rep",
                                          "linearization", "holonomy",    "algebroid"};

double default_tol(const std::string& check) {
  if (check == "axioms" || check == "simplicial") return 1e-10;
  if (check == "linearization" || check == "algebroid") return 1e-4;
  return 1e-6;
}

[[noreturn]] void config_error(std::string_view origin, const std::string& what) {
  throw Error(ErrorCode::ConfigParseError, std::string(origin) + ": " + what);
}

nlohmann::json toml_to_json(const toml::node& n, std::string_view origin) {
  if (const auto* t = n.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto&& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v, origin);
    return out;
  }
  if (const auto* a = n.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (auto&& v : *a) out.push_back(toml_to_json(v, origin));
    return out;
  }
  if (const auto* s = n.as_string()) return s->get();
  if (const auto* i = n.as_integer()) return i->get();
  if (const auto* f = n.as_floating_point()) return f->get();
  if (const auto* b = n.as_boolean()) return b->get();
  const auto& src = n.source().begin;
  config_error(origin, "unsupported value type at line " + std::to_string(src.line) + ", column " +
                           std::to_string(src.column));
}

// Groupoid or foliation selected by the builder kind, with the extra data
// the explicit submersion metrics need.
struct Built {
  std::optional<LieGroupoid> groupoid;
  std::optional<Foliation> foliation;
  std::optional<SmoothMap> pi;
};

const std::map<std::string, std::function<Built()>>& builders() {
  static const std::map<std::string, std::function<Built()>> table = {
      {"unit_line", [] { return Built{builtins::unit_line(), {}, {}}; }},
      {"pair_line", [] { return Built{builtins::pair_line(), {}, {}}; }},
      {"pair_circle", [] { return Built{builtins::pair_circle(), {}, {}}; }},
      {"plane_projection",
       [] { return Built{builtins::plane_projection(), {}, SmoothMap::block(2, 0, 1)}; }},
      {"cylinder_projection",
       [] { return Built{builtins::cylinder_projection(), {}, SmoothMap::block(3, 2, 1)}; }},
      {"z2_line", [] { return Built{builtins::z2_line(), {}, {}}; }},
      {"trivial_line", [] { return Built{builtins::trivial_line(), {}, {}}; }},
      {"so2_plane", [] { return Built{builtins::so2_plane(), {}, {}}; }},
      {"so3_space", [] { return Built{builtins::so3_space(), {}, {}}; }},
      {"horizontal_lines", [] { return Built{{}, foliations::horizontal_lines(), {}}; }},
      {"mobius_suspension", [] { return Built{{}, foliations::mobius_cover(), {}}; }},
  };
  return table;
}

const nlohmann::json& section(const ScenarioConfig& cfg, const std::string& key) {
  static const nlohmann::json empty = nlohmann::json::object();
  const auto it = cfg.raw.find(key);
  return it != cfg.raw.end() && it->is_object() ? *it : empty;
}

template <class T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

// Lazily built state shared by the checks of one run.
struct Context {
  const ScenarioConfig& cfg;
  Overrides ov;
  Built built;
  std::optional<NMetric> eta2;
  std::optional<Metric> eta0;

  const LieGroupoid& groupoid() const {
    if (!built.groupoid) throw Error(ErrorCode::InvalidParams, "check needs a groupoid builder");
    return *built.groupoid;
  }
  std::uint64_t seed() const { return ov.seed.value_or(cfg.seed); }
  std::size_t samples(const std::string& check) const {
    if (ov.samples) return *ov.samples;
    return get_or<std::size_t>(section(cfg, check), "samples", cfg.samples);
  }
  double tol(const std::string& check) const {
    if (ov.tol) return *ov.tol;
    const auto it = cfg.tol.find(check);
    return it == cfg.tol.end() ? default_tol(check) : it->second;
  }

  const NMetric& metric2() {
    if (eta2) return *eta2;
    const auto& g = groupoid();
    const std::string kind = get_or<std::string>(section(cfg, "metric"), "kind", "gauge");
    if (kind == "explicit") {
      if (!built.pi) throw Error(ErrorCode::InvalidParams, "explicit metrics need a submersion builder");
      const auto m = submersion_groupoid_metrics(g, Metric::euclidean(g.objects),
                                                 Metric::euclidean(std::make_shared<EuclideanSpace>(
                                                     built.pi->out_dim())),
                                                 *built.pi);
      eta2 = m.eta2;
      eta0 = m.eta0.metric;
    } else if (kind == "gauge") {
      eta2 = build_proper_action_2metric(g);
    } else {
      throw Error(ErrorCode::ConfigParseError, "unknown metric kind '" + kind + "'");
    }
    return *eta2;
  }

  const Metric& metric0() {
    if (!eta0) {
      const auto& g = groupoid();
      eta0 = induce_lower_metric(g, induce_lower_metric(g, metric2(), 0), 0).metric;
    }
    return *eta0;
  }

  SaturatedSubmanifold submanifold() const {
    const auto& sec = section(cfg, "submanifold");
    const std::string kind = get_or<std::string>(sec, "kind", "origin");
    const double value = get_or<double>(sec, "value", 0.0);
    if (kind == "origin") return builtins::origin(groupoid().objects->ambient_dim());
    if (kind == "unit_circle") return builtins::unit_circle();
    if (kind == "cylinder_fiber") return builtins::cylinder_fiber(value);
    if (kind == "plane_fiber") return builtins::plane_fiber(value);
    throw Error(ErrorCode::ConfigParseError, "unknown submanifold kind '" + kind + "'");
  }
};

Report check_n_metric(Context& c) {
  const auto& g = c.groupoid();
  const double tol = c.tol("n-metric");
  const std::size_t n = c.samples("n-metric");
  const NMetric& two = c.metric2();
  const NMetric one = induce_lower_metric(g, two, 0);
  const NMetric zero = induce_lower_metric(g, one, 0);
  std::vector<Report> parts;
  for (const NMetric* m : {&two, &one, &zero}) parts.push_back(verify_n_metric(g, *m, n, tol, c.seed()));
  auto rep = merge_reports("n_metric", parts, tol);
  rep.details["provenance"] = to_string(two.provenance);
  return rep;
}

Report check_normal_rep(Context& c) {
  const auto& g = c.groupoid();
  auto s = c.submanifold();
  const LinearModel m = linear_model(g, s, c.metric0());
  return normal_rep_check(g, m.restricted, m.normal, c.samples("normal-rep"), c.tol("normal-rep"),
                          c.seed());
}

Report check_linearization(Context& c) {
  const auto& sec = section(c.cfg, "linearization");
  const double radius = get_or<double>(sec, "radius", 0.1);
  LinearizeOptions opt;
  opt.seed = c.seed();
  const auto res = linearize_exp(c.groupoid(), c.metric2(), c.submanifold(), radius, opt);
  auto rep = verify_linearization(res, c.samples("linearization"), c.tol("linearization"), c.seed());
  const bool saturated = res.saturated.has_value() && res.saturated->certificate.pass;
  rep.details["saturated"] = saturated;
  rep.details["result"] = res.to_json();
  if (get_or<bool>(sec, "require_saturated", false) && !saturated) {
    rep.pass = false;
    rep.details["failure"] = "neighborhood not saturated";
  }
  return rep;
}

Report check_holonomy(Context& c) {
  if (!c.built.foliation || c.built.foliation->name != "mobius_cover") {
    throw Error(ErrorCode::InvalidParams, "holonomy check needs the mobius_suspension builder");
  }
  const auto& sec = section(c.cfg, "holonomy");
  const auto circuits = get_or<std::vector<int>>(sec, "circuits", {1, 2});
  const auto expected = get_or<std::vector<double>>(sec, "expected", {-1.0, 1.0});
  if (circuits.size() != expected.size()) {
    throw Error(ErrorCode::ConfigParseError, "holonomy circuits and expected differ in length");
  }
  const double theta0 = get_or<double>(sec, "theta0", 0.0);
  const double y0 = get_or<double>(sec, "y0", 0.0);
  std::vector<double> defects;
  nlohmann::json mats = nlohmann::json::array();
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Mat h = linear_holonomy(*c.built.foliation, foliations::mobius_loop(theta0, y0, circuits[i]),
                                  foliations::mobius_deck(circuits[i]));
    defects.push_back(std::abs(h(0, 0) - expected[i]));
    mats.push_back({{"circuits", circuits[i]}, {"matrix", {{h(0, 0)}}}, {"expected", expected[i]}});
  }
  auto rep = Report::from_defects("holonomy", std::move(defects), c.tol("holonomy"));
  rep.details["holonomy"] = mats;
  return rep;
}

Report check_algebroid(Context& c) {
  const auto& g = c.groupoid();
  const double tol = c.tol("algebroid");
  const auto fiber = algebroid_fiber_check(g, 12, 1e-8, c.seed());
  const int dim = g.objects->ambient_dim();
  const auto pts = sample_ball(dim, c.samples("algebroid"), 1.0, c.seed());
  if (!g.action || g.action->lie_basis.empty()) {
    throw Error(ErrorCode::InvalidParams, "algebroid bracket needs an action of a Lie group");
  }
  const auto gen = ActionAlgebroidSection::constant(
      Vec::Unit(static_cast<Eigen::Index>(g.action->lie_basis.size()), 0), "xi_0");
  auto rep = leibniz_check(g, gen, gen, [](const Vec& x) { return x(0); }, pts, tol);
  const auto anti = antisymmetry_check(g, gen, gen.scaled([](const Vec& x) { return x(0); }), pts);
  rep.details["fiber"] = fiber.to_json();
  rep.details["antisymmetry"] = anti.to_json();
  rep.details["anchor_at_e1"] = algebroid_at(g, Vec::Unit(dim, 0)).to_json();
  rep.pass = rep.pass && fiber.pass && anti.pass;
  return rep;
}

Report run_check(Context& c, const std::string& name) {
  if (name == "axioms") return check_axioms(c.groupoid(), c.samples(name), c.tol(name), c.seed());
  if (name == "simplicial")
    return check_simplicial(c.groupoid(), 2, c.samples(name), c.tol(name), c.seed());
  if (name == "n-metric") return check_n_metric(c);
  if (name == "normal-rep") return check_normal_rep(c);
  if (name == "linearization") return check_linearization(c);
  if (name == "holonomy") return check_holonomy(c);
  return check_algebroid(c);
}

const std::map<std::string, std::string>& builtin_texts() {
  static const std::map<std::string, std::string> table = {
      {"algebroid-so2", R"(name = "algebroid-so2"
builder = "so2_plane"
checks = ["algebroid"]
samples = 200
)"},
      {"ehresmann", R"(name = "ehresmann"
builder = "cylinder_projection"
checks = ["axioms", "n-metric", "linearization"]
samples = 50

[metric]
kind = "explicit"

[submanifold]
kind = "cylinder_fiber"
value = 0.0

[linearization]
radius = 0.1
samples = 8
require_saturated = true

[tol]
n-metric = 1e-8
linearization = 1e-6
)"},
      {"mobius-holonomy", R"(name = "mobius-holonomy"
builder = "mobius_suspension"
checks = ["holonomy"]

[holonomy]
circuits = [1, 2]
expected = [-1.0, 1.0]
)"},
      {"pair-line", R"(name = "pair-line"
builder = "pair_line"
checks = ["axioms", "simplicial"]
samples = 200
)"},
      {"slice-so2", R"(name = "slice-so2"
builder = "so2_plane"
checks = ["axioms", "n-metric", "normal-rep", "linearization"]
samples = 20

[metric]
kind = "gauge"

[submanifold]
kind = "unit_circle"

[normal-rep]
samples = 100

[linearization]
radius = 0.1
samples = 8
)"},
      {"submersion-plane", R"(name = "submersion-plane"
builder = "plane_projection"
checks = ["axioms", "simplicial", "n-metric"]
samples = 50

[metric]
kind = "explicit"

[tol]
n-metric = 1e-8
)"},
      {"z2-line", R"(name = "z2-line"
builder = "z2_line"
checks = ["axioms", "simplicial", "n-metric", "linearization"]
samples = 50

[metric]
kind = "gauge"

[submanifold]
kind = "origin"

[linearization]
radius = 0.5
samples = 20

[tol]
n-metric = 1e-12
linearization = 1e-10
)"},
  };
  return table;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::string_view format, std::string_view origin) {
  nlohmann::json raw;
  if (format == "json") {
    try {
      raw = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      config_error(origin, e.what());
    }
  } else if (format == "toml") {
    try {
      const toml::table t = toml::parse(text, origin);
      raw = toml_to_json(t, origin);
    } catch (const toml::parse_error& e) {
      const auto& b = e.source().begin;
      config_error(origin, "line " + std::to_string(b.line) + ", column " + std::to_string(b.column) +
                               ": " + std::string(e.description()));
    }
  } else {
    config_error(origin, "unknown format '" + std::string(format) + "'");
  }
  if (!raw.is_object()) config_error(origin, "top level must be a table");

  ScenarioConfig cfg;
  cfg.raw = raw;
  try {
    cfg.name = raw.value("name", std::string(origin));
    if (!raw.contains("builder")) config_error(origin, "missing 'builder'");
    cfg.builder = raw.at("builder").get<std::string>();
    cfg.checks = raw.value("checks", std::vector<std::string>{});
    const long long samples = raw.value("samples", 50LL);
    if (samples < 1) config_error(origin, "'samples' must be positive");
    cfg.samples = static_cast<std::size_t>(samples);
    const long long seed = raw.value("seed", 1LL);
    if (seed < 0) config_error(origin, "'seed' must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (raw.contains("tol")) {
      for (auto& [k, v] : raw.at("tol").items()) cfg.tol[k] = v.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(origin, std::string("bad field type: ") + e.what());
  }
  if (!builders().contains(cfg.builder)) {
    throw Error(ErrorCode::UnknownBuilder, std::string(origin) + ": unknown builder '" + cfg.builder + "'");
  }
  for (const auto& c : cfg.checks) {
    if (std::find(kChecks.begin(), kChecks.end(), c) == kChecks.end()) {
      config_error(origin, "unknown check '" + c + "'");
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParseError, path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool json = std::filesystem::path(path).extension() == ".json";
  return parse_config(ss.str(), json ? "json" : "toml", path);
}

ScenarioConfig builtin_scenario(const std::string& name) {
  const auto it = builtin_texts().find(name);
  if (it == builtin_texts().end()) {
    throw Error(ErrorCode::UnknownBuilder, "no built-in scenario '" + name + "'");
  }
  return parse_config(it->second, "toml", "builtin:" + name);
}

std::vector<std::string> list_scenarios(const std::string& filter) {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtin_texts()) {
    if (name.find(filter) != std::string::npos) out.push_back(name);
  }
  return out;
}

std::vector<std::string> list_builders() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : builders()) out.push_back(name);
  return out;
}

nlohmann::json CheckResult::to_json() const {
  nlohmann::json j{{"name", name}, {"tol", tol}, {"pass", pass}};
  if (report) j["report"] = report->to_json();
  if (!error.empty()) j["error"] = error;
  return j;
}

nlohmann::json RunReport::to_json(bool with_wall_time) const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  nlohmann::json j{{"scenario", scenario}, {"builder", builder}, {"seed", seed},
                   {"pass", pass},         {"checks", checks_json}};
  if (with_wall_time) j["wall_time_s"] = wall_time_s;
  return j;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t RunReport::hash() const {
  std::string bytes = to_json(false).dump();
  for (const auto& c : checks) {
    if (c.report) bytes += c.report->defects_csv();
  }
  return fnv1a(bytes);
}

RunReport run_scenario(const ScenarioConfig& cfg, const Overrides& ov) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{cfg, ov, builders().at(cfg.builder)(), {}, {}};
  RunReport r;
  r.scenario = cfg.name;
  r.builder = cfg.builder;
  r.seed = ctx.seed();
  r.pass = true;
  for (const auto& name : cfg.checks) {
    CheckResult c;
    c.name = name;
    c.tol = ctx.tol(name);
    try {
      c.report = run_check(ctx, name);
      c.pass = c.report->pass;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    r.pass = r.pass && c.pass;
    r.checks.push_back(std::move(c));
  }
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

RunReport run_scenario(const std::string& config, const Overrides& ov) {
  if (std::filesystem::is_regular_file(config)) return run_scenario(load_config(config), ov);
  return run_scenario(builtin_scenario(config), ov);
}

void write_outputs(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto j = r.to_json();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.hash()));
  j["hash"] = hex;
  std::ofstream(std::filesystem::path(dir) / "report.json") << j.dump(2) << "\n";
  for (const auto& c : r.checks) {
    if (!c.report) continue;
    std::ofstream(std::filesystem::path(dir) / ("defects_" + c.name + ".csv")) << c.report->defects_csv();
  }
}

}  // namespace lgkit
