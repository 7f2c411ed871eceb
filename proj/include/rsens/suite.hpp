#pragma once

#include "rsens/experiment.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rsens {

struct SuiteEntry {
  std::string id;
  std::string description;
  bool passed = false;
  nlohmann::json summary;  // result sections of the underlying reports
  double wall_time_ms = 0.0;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  bool passed = false;

  // Everything except wall times; byte-identical across runs with one seed.
  nlohmann::json payload(std::uint64_t seed) const;
  ExperimentReport as_report(std::uint64_t seed) const;
};

// Every reference configuration (shift sensitivity, failure witnesses, rate
// and entropy identities, rank-one constructions, products), run in order.
SuiteReport run_reference_suite(std::uint64_t seed);

// Config texts used by the suite, keyed by name; also shipped under configs/.
std::vector<std::pair<std::string, std::string>> reference_configs(std::uint64_t seed);

// Fixed-width pass/fail table.
std::string format_suite_table(const SuiteReport& report);

}  // namespace rsens
