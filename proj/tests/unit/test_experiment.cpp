#include "rsens/experiment.hpp"
#include "rsens/suite.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace rsens;
using nlohmann::json;

namespace {

std::string shift_config(const std::string& p, const std::string& sides, const std::string& experiment) {
  return "[system]\ntype = shift\np = " + p + "\nsides = " + sides + "\n\n[experiment]\n" + experiment;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST(Experiment, PairwiseUniformPassesWithTimeEqualIndex) {
  const auto r = run_experiment_text(
      shift_config("1/2,1/2", "one", "kind = check-rps\nseed = 3\ndelta = 1/2\na = 1/log(2)\npairs = 500\n"));
  ASSERT_EQ(r.exit_code, kExitRan);
  const auto& res = r.payload["result"];
  EXPECT_EQ(res["pass_fraction"], 1.0);
  EXPECT_EQ(res["time_equals_index"], 500);
  EXPECT_EQ(r.payload["rows"].size(), 500u);
  EXPECT_EQ(r.payload["status"], "ok");
  EXPECT_EQ(r.payload["seed"], 3);
}

TEST(Experiment, FailVerdictStillExitsZero) {
  const auto r = run_experiment_text(
      shift_config("1/2,1/2", "two", "kind = check-rps\nseed = 3\ndelta = 0.9\na = 1\npairs = 500\n"));
  EXPECT_EQ(r.exit_code, kExitRan);
  EXPECT_FALSE(r.payload["result"]["passed"].get<bool>());
}

TEST(Experiment, DeterministicPayloadBytes) {
  for (const auto& [name, text] : reference_configs(5)) {
    if (name.rfind("rate-", 0) == 0 || name.rfind("brin-katok", 0) == 0) continue;
    const auto a = run_experiment_text(text);
    const auto b = run_experiment_text(text);
    EXPECT_EQ(a.payload.dump(), b.payload.dump()) << name;
  }
}

TEST(Experiment, SeedOverrideChangesSamples) {
  const std::string text =
      shift_config("1/3,2/3", "one", "kind = check-rps\nseed = 1\ndelta = 1/2\na = 3\npairs = 20\n");
  const auto a = run_experiment_text(text, 1);
  const auto b = run_experiment_text(text, 2);
  EXPECT_EQ(a.payload, run_experiment_text(text).payload);
  EXPECT_NE(a.payload["rows"], b.payload["rows"]);
  EXPECT_EQ(b.payload["seed"], 2);
}

TEST(Experiment, ConfigErrorExitCode) {
  const auto r = run_experiment_text(shift_config("1/3,1/3", "one", "kind = rate\nseed = 1\n"));
  EXPECT_EQ(r.exit_code, kExitConfigError);
  EXPECT_EQ(r.payload["status"], "error");
  EXPECT_NE(r.payload["error"]["message"].get<std::string>().find("p"), std::string::npos);

  const auto wrong_system = run_experiment_text(
      shift_config("1/2,1/2", "one", "kind = witness-rps-failure\nseed = 1\ndelta = 0.5\na = 1\n"));
  EXPECT_EQ(wrong_system.exit_code, kExitConfigError);
}

TEST(Experiment, UndefinedAtDepthExitCode) {
  const auto r = run_experiment_text(R"(
[system]
type = rank-one
w0 = 2/3
cycle = 3 | 0,1,0
depth = 2

[experiment]
kind = check-rps
seed = 1
delta = 0.99
a = 100
pairs = 10
)");
  EXPECT_EQ(r.exit_code, kExitRuntimeIncapacity);
  EXPECT_EQ(r.payload["status"], "error");
}

TEST(Experiment, WitnessRowsCoverEveryStep) {
  const auto r = run_experiment_text(
      shift_config("1/2,1/2", "two", "kind = witness-rps-failure\nseed = 2\ndelta = 0.9\na = 5\n"));
  ASSERT_EQ(r.exit_code, kExitRan);
  const auto& res = r.payload["result"];
  EXPECT_TRUE(res["verified"].get<bool>());
  EXPECT_EQ(r.payload["rows"].size(), res["bound"].get<std::size_t>() + 1);
  std::int64_t n = 0;
  for (const auto& row : r.payload["rows"]) {
    EXPECT_EQ(row["n"], n++);
    EXPECT_TRUE(row["distance"].is_string());
  }

  const auto chacon = run_experiment_text(
      "[system]\ntype = rank-one\nw0 = 2/3\ncycle = 3 | 0,1,0\n\n[experiment]\nkind = witness-rankone-failure\n"
      "seed = 1\ndelta = 0.01\na = 1\n");
  ASSERT_EQ(chacon.exit_code, kExitRan);
  EXPECT_EQ(chacon.payload["rows"].size(), chacon.payload["result"]["bound"].get<std::size_t>() + 1);
}

TEST(Experiment, ExactRationalsAndRealsSerialize) {
  EXPECT_EQ(json_rational(Rational(6, 8)), "3/4");
  EXPECT_EQ(json_rational(Rational(2)), "2/1");
  EXPECT_EQ(json_real(1.0 / 3.0).dump(), "0.333333333333");
  EXPECT_EQ(json_real(0.5).dump(), "0.5");
}

TEST(Experiment, CsvHasOneLinePerRow) {
  const auto r = run_experiment_text(
      shift_config("1/2,1/2", "one", "kind = check-rs\nseed = 3\ndelta = 1/2\na = 2\npoints = 4\neps = dyadic:5\n"));
  ASSERT_EQ(r.exit_code, kExitRan);
  const std::string csv = emit_report(r, ReportFormat::csv);
  EXPECT_EQ(line_count(csv), 1 + 20u);
  EXPECT_NE(csv.substr(0, csv.find('\n')).find("sensitive_time"), std::string::npos);
}

TEST(Experiment, EmptyTrialReportIsValid) {
  ExperimentReport r;
  r.payload = {{"kind", "check-rps"}, {"rows", json::array()}, {"status", "ok"}};
  const std::string text = emit_report(r, ReportFormat::json);
  const auto doc = json::parse(text);
  EXPECT_TRUE(doc["payload"]["rows"].empty());
  EXPECT_TRUE(doc.contains("wall_time_ms"));
  EXPECT_EQ(emit_report(r, ReportFormat::csv), "\n");
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
}

TEST(Experiment, RateReportMatchesEntropy) {
  const auto r = run_experiment_text(
      shift_config("1/3,2/3", "one", "kind = rate\nseed = 9\nhorizon = 100000\npoints = 2\ntolerance = 0.05\n"));
  ASSERT_EQ(r.exit_code, kExitRan);
  EXPECT_TRUE(r.payload["result"]["all_within_tolerance"].get<bool>());
}

TEST(Experiment, ProductCheckComparesLeftFactor) {
  const auto r = run_experiment_text(R"(
[system]
type = product

[system.left]
type = shift
p = 1/2,1/2

[system.right]
type = rotation
alpha = 0.3

[experiment]
kind = check-rs
seed = 1
delta = 1/2
a = 1/log(2) + 0.01
points = 5
eps = dyadic:4
)");
  ASSERT_EQ(r.exit_code, kExitRan);
  EXPECT_TRUE(r.payload["result"]["product_le_left"].get<bool>());
  for (const auto& row : r.payload["rows"]) EXPECT_TRUE(row["product_le_left"].get<bool>());
}

TEST(Experiment, BoundCheckAudits) {
  const auto shift = run_experiment_text(shift_config("1/2,1/2", "one", "kind = bound-check\nseed = 1\ntrials = 200\n"));
  ASSERT_EQ(shift.exit_code, kExitRan);
  EXPECT_TRUE(shift.payload["result"]["passed"].get<bool>());
  const auto chacon = run_experiment_text(
      "[system]\ntype = rank-one\nw0 = 2/3\ncycle = 3 | 0,1,0\n\n[experiment]\nkind = bound-check\nseed = 1\n"
      "stages = 4\ntrials = 20\n");
  ASSERT_EQ(chacon.exit_code, kExitRan);
  EXPECT_EQ(chacon.payload["result"]["heights"], json::array({"1", "4", "13", "40", "121"}));
  EXPECT_TRUE(chacon.payload["result"]["passed"].get<bool>());
}
