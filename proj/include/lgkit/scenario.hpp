#pragma once

#include "lgkit/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lgkit {

/// Parsed scenario. `raw` keeps the whole document (TOML converted to JSON)
/// for per-check tables such as [metric], [submanifold], [linearization].
struct ScenarioConfig {
  std::string name;
  std::string builder;
  std::vector<std::string> checks;
  /// Per-check tolerance overrides from the [tol] table.
  std::map<std::string, double> tol;
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  nlohmann::json raw = nlohmann::json::object();
};

/// Command-line values; they win over file values.
struct Overrides {
  std::optional<double> tol;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
};

/// format is "toml" or "json". Throws ConfigParseError (with line and
/// column for syntax errors) or UnknownBuilder.
ScenarioConfig parse_config(std::string_view text, std::string_view format,
                            std::string_view origin = "<config>");
/// Format from the extension: .json is JSON, anything else TOML.
ScenarioConfig load_config(const std::string& path);

/// Built-in scenario by name; throws UnknownBuilder.
ScenarioConfig builtin_scenario(const std::string& name);
/// Alphabetical names containing `filter` (all for an empty filter).
std::vector<std::string> list_scenarios(const std::string& filter = "");
/// Builder kinds accepted in configs.
std::vector<std::string> list_builders();

struct CheckResult {
  std::string name;
  double tol = 0.0;
  std::optional<Report> report;
  /// Set when the check threw; the check then fails.
  std::string error;
  bool pass = false;

  nlohmann::json to_json() const;
};

struct RunReport {
  std::string scenario;
  std::string builder;
  std::uint64_t seed = 1;
  std::vector<CheckResult> checks;
  double wall_time_s = 0.0;
  bool pass = false;

  nlohmann::json to_json(bool with_wall_time = true) const;
  /// FNV-1a of the report JSON without the wall-time field.
  std::uint64_t hash() const;
};

std::uint64_t fnv1a(std::string_view bytes);

/// Runs the checks in declared order. Check errors are recorded in the
/// report, not thrown.
RunReport run_scenario(const ScenarioConfig& cfg, const Overrides& ov = {});
/// Existing file path, else built-in name.
RunReport run_scenario(const std::string& config, const Overrides& ov = {});

/// Writes report.json and defects_<check>.csv into dir (created if needed).
void write_outputs(const RunReport& r, const std::string& dir);

}  // namespace lgkit
