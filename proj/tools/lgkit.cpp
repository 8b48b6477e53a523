#include "lgkit/scenario.hpp"
#include "lgkit/types.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Lie groupoid verification scenarios"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  std::optional<double> tol;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario from a TOML/JSON file or a built-in name");
  run->add_option("config", config, "Config path or built-in scenario name")->required();
  run->add_option("--tol", tol, "Tolerance for every check");
  run->add_option("--samples", samples, "Sample budget for every check");
  run->add_option("--seed", seed, "Sampling seed");
  run->add_option("--out", out_dir, "Output directory for report.json and defect tables");

  std::string filter;
  auto* list = app.add_subcommand("list", "List built-in scenarios");
  list->add_option("filter", filter, "Substring filter");
  bool builders = false;
  list->add_flag("--builders", builders, "List builder kinds instead");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& n : builders ? lgkit::list_builders() : lgkit::list_scenarios(filter)) {
      if (builders && n.find(filter) == std::string::npos) continue;
      std::cout << n << "\n";
    }
    return 0;
  }

  try {
    const auto report = lgkit::run_scenario(config, lgkit::Overrides{tol, samples, seed});
    lgkit::write_outputs(report, out_dir);
    for (const auto& c : report.checks) {
      std::printf("%-14s %s", c.name.c_str(), c.pass ? "PASS" : "FAIL");
      if (c.report) std::printf("  max_defect=%.3e tol=%.1e", c.report->max_defect, c.tol);
      if (!c.error.empty()) std::printf("  error: %s", c.error.c_str());
      std::printf("\n");
    }
    std::printf("%s: %s  hash=%016llx  (%.2f s)\n", report.scenario.c_str(),
                report.pass ? "PASS" : "FAIL", static_cast<unsigned long long>(report.hash()),
                report.wall_time_s);
    return report.pass ? 0 : 1;
  } catch (const lgkit::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}
