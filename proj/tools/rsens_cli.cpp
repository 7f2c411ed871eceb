#include "rsens/experiment.hpp"
#include "rsens/suite.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out;
};

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << path << "\n";
    return rsens::kExitRuntimeIncapacity;
  }
  f << text;
  return 0;
}

int run_config(const Common& opts, const std::vector<rsens::ExperimentKind>& accepted) {
  rsens::ReportFormat format;
  std::string text;
  try {
    format = rsens::parse_report_format(opts.format);
    std::ifstream in(opts.config, std::ios::binary);
    if (!in) throw rsens::ConfigError("cannot read config file " + opts.config);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    auto cfg = rsens::parse_config(text);
    bool ok = false;
    for (auto k : accepted) ok = ok || k == cfg.kind;
    if (!ok) throw rsens::ConfigError("config kind '" + rsens::to_string(cfg.kind) + "' does not match this subcommand");
    if (opts.seed) cfg.params.seed = *opts.seed;
    const auto report = rsens::run_experiment(cfg);
    if (report.exit_code != rsens::kExitRan)
      std::cerr << "error: " << report.payload["error"]["message"].get<std::string>() << "\n";
    const int io = write_output(rsens::emit_report(report, format), opts.out);
    return report.exit_code != rsens::kExitRan ? report.exit_code : io;
  } catch (const rsens::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rsens::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restricted sensitivity experiments on shifts, rank-one maps and products"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    std::vector<rsens::ExperimentKind> kinds;
  };
  using K = rsens::ExperimentKind;
  const Sub subs[] = {
      {"check-rs", "restricted sensitivity at sampled points over an epsilon grid", {K::check_rs}},
      {"check-rps", "restricted pairwise sensitivity over sampled pairs", {K::check_rps}},
      {"witness", "failure witnesses (two-sided shift or rank-one)",
       {K::witness_rps_failure, K::witness_rankone_failure}},
      {"entropy", "analytic, Birkhoff, Brin-Katok or partition entropy", {K::entropy}},
      {"rate", "minimal asymptotic rate against the entropy", {K::rate}},
      {"bound-check", "construction and ball-measure audits", {K::bound_check}},
  };

  std::vector<Common> options(std::size(subs));
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    auto* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    cmd->add_option("--config", options[i].config, "experiment config file")->required();
    cmd->add_option("--seed", options[i].seed, "override the config seed");
    cmd->add_option("--format", options[i].format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", options[i].out, "write the report here instead of stdout");
    commands.push_back(cmd);
  }

  std::uint64_t suite_seed = 1;
  std::string suite_format = "json", suite_out;
  auto* suite_cmd = app.add_subcommand("paper-suite", "run every reference configuration and print a summary");
  suite_cmd->add_option("--seed", suite_seed, "seed for every configuration");
  suite_cmd->add_option("--format", suite_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  suite_cmd->add_option("--out", suite_out, "also write the suite report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rsens::kExitConfigError;
  }

  for (std::size_t i = 0; i < commands.size(); ++i)
    if (commands[i]->parsed()) return run_config(options[i], subs[i].kinds);

  const auto suite = rsens::run_reference_suite(suite_seed);
  std::cout << rsens::format_suite_table(suite);
  if (!suite_out.empty())
    return write_output(rsens::emit_report(suite.as_report(suite_seed), rsens::parse_report_format(suite_format)),
                        suite_out);
  return 0;
}
