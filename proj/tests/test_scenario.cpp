#include "lgkit/scenario.hpp"
#include "lgkit/types.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lgkit;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidParams;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, ListIncludesRequiredBuiltins) {
  const auto all = list_scenarios();
  for (const char* n : {"ehresmann", "slice-so2", "z2-line", "mobius-holonomy"}) {
    EXPECT_NE(std::find(all.begin(), all.end(), n), all.end()) << n;
  }
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(list_scenarios(""), all);
  EXPECT_TRUE(list_scenarios("no-such-thing").empty());
  EXPECT_EQ(list_scenarios("so2"), (std::vector<std::string>{"algebroid-so2", "slice-so2"}));
}

TEST(Scenario, TomlAndJsonParseToSameConfig) {
  const auto t = parse_config(R"(name = "x"
builder = "pair_line"
checks = ["axioms"]
samples = 7
seed = 3
[tol]
axioms = 1e-9
)", "toml");
  const auto j = parse_config(
      R"({"name": "x", "builder": "pair_line", "checks": ["axioms"], "samples": 7, "seed": 3,
          "tol": {"axioms": 1e-9}})",
      "json");
  EXPECT_EQ(t.raw, j.raw);
  EXPECT_EQ(t.samples, 7u);
  EXPECT_EQ(t.seed, 3u);
  EXPECT_DOUBLE_EQ(t.tol.at("axioms"), 1e-9);
}

TEST(Scenario, MalformedConfigReportsLineAndColumn) {
  try {
    parse_config("name = \"a\"\nbuilder = = 3\n", "toml", "cfg.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
  }
  try {
    parse_config("{\"builder\": \n  \"pair_line\",, }", "json", "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Scenario, BadFieldsAreRejected) {
  EXPECT_EQ(code_of([] { parse_config("builder = \"nope\"\n", "toml"); }), ErrorCode::UnknownBuilder);
  EXPECT_EQ(code_of([] { parse_config("checks = []\n", "toml"); }), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of([] { parse_config("builder = \"pair_line\"\nchecks = [\"x\"]\n", "toml"); }),
            ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of([] { parse_config("builder = \"pair_line\"\nsamples = \"a\"\n", "toml"); }),
            ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of([] { builtin_scenario("nope"); }), ErrorCode::UnknownBuilder);
}

TEST(Scenario, FlagsWinOverFileValues) {
  const auto cfg = parse_config("builder = \"pair_line\"\nchecks = [\"axioms\"]\nsamples = 9\n"
                                "seed = 4\n[tol]\naxioms = 1e-3\n",
                                "toml");
  const auto plain = run_scenario(cfg);
  EXPECT_EQ(plain.seed, 4u);
  EXPECT_EQ(plain.checks[0].report->samples, 9u);
  EXPECT_DOUBLE_EQ(plain.checks[0].tol, 1e-3);
  const auto over = run_scenario(cfg, Overrides{1e-11, 5, 8});
  EXPECT_EQ(over.seed, 8u);
  EXPECT_EQ(over.checks[0].report->samples, 5u);
  EXPECT_DOUBLE_EQ(over.checks[0].report->tol, 1e-11);
}

TEST(Scenario, CheckErrorsAreRecordedNotThrown) {
  const auto cfg = parse_config("builder = \"pair_line\"\nchecks = [\"holonomy\", \"axioms\"]\n", "toml");
  const auto r = run_scenario(cfg);
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_FALSE(r.checks[0].pass);
  EXPECT_FALSE(r.checks[0].error.empty());
  EXPECT_TRUE(r.checks[1].pass);
  EXPECT_FALSE(r.pass);
}

TEST(Scenario, SameSeedSameHash) {
  const auto a = run_scenario(std::string("mobius-holonomy"));
  const auto b = run_scenario(std::string("mobius-holonomy"));
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump());
  const auto c = run_scenario(std::string("pair-line"), Overrides{{}, 20, 1});
  const auto d = run_scenario(std::string("pair-line"), Overrides{{}, 20, 2});
  EXPECT_NE(c.hash(), d.hash());
}

TEST(Scenario, OutputsReportAndDefectTables) {
  const auto dir = std::filesystem::temp_directory_path() / "lgkit_scenario_test";
  std::filesystem::remove_all(dir);
  const auto r = run_scenario(std::string("pair-line"), Overrides{{}, 10, {}});
  write_outputs(r, dir.string());
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["scenario"], "pair-line");
  EXPECT_TRUE(report.contains("wall_time_s"));
  EXPECT_TRUE(report.contains("hash"));
  EXPECT_EQ(report["checks"][0]["tol"], 1e-10);
  const std::string csv = slurp(dir / "defects_axioms.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample_index,defect");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_TRUE(std::filesystem::exists(dir / "defects_simplicial.csv"));
}

TEST(Scenario, ConfigFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lgkit_scenario_cfg.json";
  std::ofstream(path) << R"({"name": "file", "builder": "mobius_suspension", "checks": ["holonomy"]})";
  const auto r = run_scenario(path.string());
  EXPECT_EQ(r.scenario, "file");
  EXPECT_TRUE(r.pass);
}
