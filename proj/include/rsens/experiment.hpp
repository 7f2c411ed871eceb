#pragma once

#include "rsens/config.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace rsens {

// Process exit codes of the harness.
inline constexpr int kExitRan = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeIncapacity = 3;

struct ExperimentReport {
  // Keys are sorted; reals carry 12 significant digits and exact rationals
  // are "num/den" strings, so equal runs give equal bytes.
  nlohmann::json payload;
  double wall_time_ms = 0.0;
  int exit_code = kExitRan;
};

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(std::string_view text);

ExperimentReport run_experiment(const ExperimentConfig& config);
// Parses first; a parse failure becomes a report with exit code 2.
ExperimentReport run_experiment_text(std::string_view config_text);
// Runs with the seed replaced.
ExperimentReport run_experiment_text(std::string_view config_text, std::uint64_t seed);

// JSON: {"payload": ..., "wall_time_ms": ...}. CSV: the payload's "rows"
// table, one header line then one line per row.
std::string emit_report(const ExperimentReport& report, ReportFormat format);

// JSON helpers shared by the suite.
nlohmann::json json_real(double x);
nlohmann::json json_rational(const Rational& q);

}  // namespace rsens
