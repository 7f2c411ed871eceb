#include "rsens/suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace rsens {

using nlohmann::json;

namespace {

std::string shift(const std::string& p, const std::string& sides, const std::string& section = "system") {
  return "[" + section + "]\ntype = shift\np = " + p + "\nsides = " + sides + "\n";
}

std::string experiment(const std::string& kind, std::uint64_t seed, const std::string& extra) {
  return "\n[experiment]\nkind = " + kind + "\nseed = " + std::to_string(seed) + "\n" + extra;
}

const std::string kChacon = "[system]\ntype = rank-one\nw0 = 2/3\ncycle = 3 | 0,1,0\n";
const std::string kBinary = "[system]\ntype = rank-one\nw0 = 1/2\ncycle = 2 | 0,1\n";

// Multipliers m for the rate grid a = m / log 2.
const std::vector<std::string> kRateMultipliers{"0.5", "0.75", "1", "1.25", "1.5", "2", "4"};

const std::vector<std::pair<std::string, std::string>> kWitnessGrid{
    {"0.5", "1"}, {"0.5", "5"}, {"0.5", "20"}, {"0.75", "1"}, {"0.75", "5"},
    {"0.75", "20"}, {"0.9", "1"}, {"0.9", "5"}, {"0.9", "20"}};

double real(const json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

}  // namespace

std::vector<std::pair<std::string, std::string>> reference_configs(std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("pairwise-uniform", shift("1/2,1/2", "one") +
                                           experiment("check-rps", seed, "delta = 1/2\na = 1/log(2)\npairs = 10000\n"));
  out.emplace_back("pairwise-nonuniform",
                   shift("1/3,2/3", "one") +
                       experiment("check-rps", seed, "delta = 1/2\na = -1/log(2/3) + 0.000001\npairs = 10000\n"));
  for (const auto& [delta, a] : kWitnessGrid)
    out.emplace_back("two-sided-witness-" + delta + "-" + a,
                     shift("1/2,1/2", "two") +
                         experiment("witness-rps-failure", seed, "delta = " + delta + "\na = " + a + "\n"));
  out.emplace_back("two-sided-restricted",
                   shift("1/2,1/2", "two") +
                       experiment("check-rs", seed, "delta = 1/4\na = 1/(2*log(2))\npoints = 100\neps = dyadic:10\n"));
  for (const auto& p : {"1/2,1/2", "1/3,2/3", "1/4,1/4,1/2"}) {
    std::string name = std::string("rate-") + p;
    for (auto& ch : name)
      if (ch == '/' || ch == ',') ch = '_';
    out.emplace_back(name, shift(p, "one") +
                               experiment("rate", seed, "horizon = 1000000\npoints = 5\ntolerance = 0.05\n"));
  }
  for (const auto& m : kRateMultipliers)
    out.emplace_back("pairwise-rate-" + m, shift("1/2,1/2", "one") +
                                               experiment("check-rps", seed,
                                                          "delta = 1/2\na = " + m + "/log(2)\npairs = 1000\n"));
  out.emplace_back("partition-entropy-uniform",
                   shift("1/2,1/2", "one") +
                       experiment("entropy", seed, "method = partition\npartition = symbol\nn = 10\n"));
  out.emplace_back("restricted-above-entropy-rate",
                   shift("1/2,1/2", "one") +
                       experiment("check-rs", seed, "delta = 1/2\na = 2/log(2)\npoints = 100\neps = dyadic:10\n"));
  out.emplace_back("chacon-construction",
                   kChacon + experiment("bound-check", seed, "stages = 4\ntrials = 100\n"));
  out.emplace_back("chacon-witness-0.01-1",
                   kChacon + experiment("witness-rankone-failure", seed, "delta = 0.01\na = 1\nroute = lower-bound\n"));
  out.emplace_back("chacon-witness-0.05-3",
                   kChacon + experiment("witness-rankone-failure", seed, "delta = 0.05\na = 3\nroute = lower-bound\n"));
  out.emplace_back("binary-rank-one-witness",
                   kBinary +
                       experiment("witness-rankone-failure", seed, "delta = 0.01\na = 1\nroute = measure-preserving\n"));
  out.emplace_back("product-transfer",
                   "[system]\ntype = product\n\n" + shift("1/2,1/2", "one", "system.left") + "\n" +
                       shift("1/2,1/2", "two", "system.right") +
                       experiment("check-rs", seed, "delta = 1/2\na = 1/log(2) + 0.01\npoints = 50\neps = dyadic:10\n"));
  out.emplace_back("brin-katok-uniform",
                   shift("1/2,1/2", "one") +
                       experiment("entropy", seed, "method = brin-katok\ndelta = 1/2\nn = 10000\npoints = 5\n"));
  out.emplace_back("brin-katok-nonuniform",
                   shift("1/3,2/3", "one") +
                       experiment("entropy", seed, "method = brin-katok\ndelta = 1/2\nn = 10000\npoints = 5\n"));
  out.emplace_back("shift-bounds-one-sided",
                   shift("1/2,1/2", "one") + experiment("bound-check", seed, "trials = 1000\n"));
  out.emplace_back("shift-bounds-two-sided",
                   shift("1/3,2/3", "two") + experiment("bound-check", seed, "trials = 1000\n"));
  return out;
}

SuiteReport run_reference_suite(std::uint64_t seed) {
  std::map<std::string, std::string> configs;
  for (auto& [name, text] : reference_configs(seed)) configs[name] = text;

  SuiteReport suite;
  std::map<std::string, json> results;
  auto run = [&](const std::string& name, SuiteEntry& entry) -> const json& {
    const auto report = run_experiment_text(configs.at(name));
    entry.wall_time_ms += report.wall_time_ms;
    json summary{{"status", report.payload.value("status", "error")}};
    if (report.payload.contains("result")) summary["result"] = report.payload["result"];
    if (report.payload.contains("error")) summary["error"] = report.payload["error"];
    entry.summary[name] = summary;
    results[name] = report.payload.value("result", json::object());
    return results[name];
  };
  auto add = [&](std::string id, std::string description, const std::function<bool(SuiteEntry&)>& body) {
    SuiteEntry e;
    e.id = std::move(id);
    e.description = std::move(description);
    e.summary = json::object();
    e.passed = body(e);
    suite.entries.push_back(std::move(e));
  };

  add("pairwise-uniform", "uniform one-sided 2-shift is restricted pairwise sensitive, time = I(x, y)",
      [&](SuiteEntry& e) {
        const auto& r = run("pairwise-uniform", e);
        return r.value("pass_fraction", 0.0) == 1.0 && r.value("time_equals_index", -1) == r.value("trials", -2);
      });
  add("pairwise-nonuniform", "(1/3, 2/3) one-sided shift is restricted pairwise sensitive", [&](SuiteEntry& e) {
    return run("pairwise-nonuniform", e).value("pass_fraction", 0.0) == 1.0;
  });
  add("two-sided-witness", "two-sided 2-shift: exhaustively verified non-separating cylinders", [&](SuiteEntry& e) {
    bool ok = true;
    for (const auto& [delta, a] : kWitnessGrid)
      ok = run("two-sided-witness-" + delta + "-" + a, e).value("verified", false) && ok;
    return ok;
  });
  add("two-sided-restricted", "two-sided 2-shift is restricted sensitive with delta = 1/4", [&](SuiteEntry& e) {
    const auto& r = run("two-sided-restricted", e);
    return r.value("passed", false) && !r.value("approximate", true);
  });
  add("rate-entropy", "1 / minimal asymptotic rate matches the entropy within 5%", [&](SuiteEntry& e) {
    bool ok = true;
    for (const auto* name : {"rate-1_2_1_2", "rate-1_3_2_3", "rate-1_4_1_4_1_2"})
      ok = run(name, e).value("all_within_tolerance", false) && ok;
    return ok;
  });
  add("pairwise-entropy-bound", "every passing pairwise rate a has partition entropy >= 1/a - 0.02",
      [&](SuiteEntry& e) {
        const double h = real(run("partition-entropy-uniform", e)["value"]);
        bool ok = true, any = false;
        for (const auto& m : kRateMultipliers) {
          const auto& r = run("pairwise-rate-" + m, e);
          if (r.value("pass_fraction", 0.0) != 1.0) continue;
          any = true;
          const double a = evaluate_real(m + "/log(2)");
          ok = ok && h >= 1.0 / a - 0.02;
        }
        return ok && any;
      });
  add("restricted-above-entropy-rate", "1/a < entropy gives restricted sensitivity", [&](SuiteEntry& e) {
    const auto& r = run("restricted-above-entropy-rate", e);
    return r.value("passed", false) && !r.value("approximate", true);
  });
  add("chacon-construction", "Chacon heights, level disjointness, lambda(T^-1 E) = lambda(E)", [&](SuiteEntry& e) {
    const auto& r = run("chacon-construction", e);
    return r.value("passed", false) && r["heights"] == json::array({"1", "4", "13", "40", "121"});
  });
  add("chacon-witness", "Chacon transformation is not restricted sensitive", [&](SuiteEntry& e) {
    const bool a = run("chacon-witness-0.01-1", e).value("verified", false);
    const bool b = run("chacon-witness-0.05-3", e).value("verified", false);
    return a && b;
  });
  add("binary-rank-one-witness", "r = 2, s = (0, 1) rank-one map is not restricted sensitive", [&](SuiteEntry& e) {
    return run("binary-rank-one-witness", e).value("verified", false);
  });
  add("product-transfer", "restricted sensitivity passes to a product", [&](SuiteEntry& e) {
    const auto& r = run("product-transfer", e);
    return r.value("passed", false) && r.value("product_le_left", false);
  });
  add("brin-katok", "Bowen-ball entropy: log 2 exactly, (1/3, 2/3) within 2%", [&](SuiteEntry& e) {
    const auto& u = run("brin-katok-uniform", e);
    const json log2 = json_real(std::log(2.0));
    const bool exact = u["min_value"] == log2 && u["max_value"] == log2;
    const auto& n = run("brin-katok-nonuniform", e);
    const double h = real(n["analytic"]);
    const bool close = std::abs(real(n["min_value"]) - h) <= 0.02 * h && std::abs(real(n["max_value"]) - h) <= 0.02 * h;
    return exact && close;
  });
  add("separation-brute-force", "exact separation time matches exhaustive enumeration", [&](SuiteEntry& e) {
    const auto& r = run("shift-bounds-one-sided", e);
    return r.value("separation_cases", 0) > 0 && r.value("separation_mismatches", -1) == 0;
  });
  add("ball-semicontinuity", "mu B_r(y) >= mu B_{r-eta}(x) whenever d(x, y) < eta < r", [&](SuiteEntry& e) {
    bool ok = true;
    for (const auto* name : {"shift-bounds-one-sided", "shift-bounds-two-sided"}) {
      const auto& r = results.count(name) ? results[name] : run(name, e);
      if (!e.summary.contains(name)) e.summary[name] = json{{"status", "ok"}, {"result", r}};
      ok = ok && r.value("semicontinuity_trials", 0) > 0 &&
           r.value("semicontinuity_holds", -1) == r.value("semicontinuity_trials", -2);
    }
    return ok;
  });

  suite.passed = true;
  for (const auto& e : suite.entries) suite.passed = suite.passed && e.passed;
  return suite;
}

json SuiteReport::payload(std::uint64_t seed) const {
  json entries_json = json::array();
  json rows = json::array();
  for (const auto& e : entries) {
    entries_json.push_back({{"id", e.id}, {"description", e.description}, {"passed", e.passed}, {"summary", e.summary}});
    rows.push_back({{"id", e.id}, {"description", e.description}, {"passed", e.passed}});
  }
  return {{"kind", "suite"}, {"seed", seed}, {"passed", passed}, {"entries", entries_json}, {"rows", rows}};
}

ExperimentReport SuiteReport::as_report(std::uint64_t seed) const {
  ExperimentReport r;
  r.payload = payload(seed);
  for (const auto& e : entries) r.wall_time_ms += e.wall_time_ms;
  return r;
}

std::string format_suite_table(const SuiteReport& report) {
  std::size_t width = 2;
  for (const auto& e : report.entries) width = std::max(width, e.id.size());
  std::ostringstream os;
  for (const auto& e : report.entries) {
    os << (e.passed ? "PASS  " : "FAIL  ") << e.id << std::string(width - e.id.size() + 2, ' ');
    char ms[32];
    std::snprintf(ms, sizeof ms, "%9.1f ms  ", e.wall_time_ms);
    os << ms << e.description << "\n";
  }
  os << (report.passed ? "all entries passed" : "some entries FAILED") << "\n";
  return os.str();
}

}  // namespace rsens
