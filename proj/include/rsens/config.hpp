#pragma once

#include "rsens/metric_system.hpp"
#include "rsens/rank_one.hpp"
#include "rsens/rational.hpp"
#include "rsens/symbolic_point.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsens {

// Raised for anything wrong with a configuration; the message names the
// offending section and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Real-valued expression: numbers, + - * /, parentheses and log(). Throws
// ConfigError on malformed input.
double evaluate_real(std::string_view text);

// A real parameter that remembers how it was written so that it serializes
// back verbatim.
struct RealParam {
  std::string text;
  double value = 0.0;

  static RealParam parse(std::string_view text);
  friend bool operator==(const RealParam&, const RealParam&) = default;
};

struct SystemDecl {
  enum class Kind { shift, rank_one, product, rotation };
  Kind kind = Kind::shift;

  // shift
  std::vector<Rational> probabilities{Rational(1, 2), Rational(1, 2)};
  Sidedness sides = Sidedness::one_sided;
  std::int64_t horizon = 1'000'000;

  // rank-one
  RankOneSpec spec;
  std::size_t depth = 64;
  Rational space_cap = 1;
  bool allow_over_cap = false;

  // rotation
  RealParam alpha{"0.5", 0.5};

  // product: exactly two components
  std::vector<SystemDecl> components;

  // Replace exact ball measures by sampling with this many points.
  std::size_t sampled_balls = 0;

  SystemPtr build() const;

  friend bool operator==(const SystemDecl&, const SystemDecl&) = default;
};

std::string to_string(SystemDecl::Kind kind);

enum class ExperimentKind { check_rs, check_rps, witness_rps_failure, witness_rankone_failure, entropy, rate,
                            bound_check };
std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentParams {
  std::uint64_t seed = 0;
  std::optional<RealParam> delta;
  std::optional<RealParam> rate_a;
  // Either "dyadic:<count>" (delta * 2^-k) or an explicit list.
  std::size_t eps_dyadic = 10;
  std::vector<RealParam> eps_values;
  std::size_t pairs = 1000;
  std::size_t points = 100;
  std::size_t trials = 1000;
  std::int64_t horizon = 1'000'000;
  std::size_t samples = 20000;
  std::int64_t n = 1000;
  std::string method = "analytic";  // analytic | birkhoff | brin-katok | partition
  std::string partition = "symbol";  // symbol | intervals:<c1>,<c2>,...
  std::string route = "lower-bound";
  std::vector<std::int64_t> c_grid;  // empty: default grid
  double tolerance = 0.05;
  std::size_t stages = 4;  // bound-check on rank-one

  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

struct ExperimentConfig {
  SystemDecl system;
  ExperimentKind kind = ExperimentKind::check_rps;
  ExperimentParams params;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// INI-style text:
//   [system]            type, p, sides, horizon, w0, prefix, cycle, depth,
//                       space_cap, allow_over_cap, alpha, sampled_balls
//   [system.left] / [system.right]   components of a product (nestable)
//   [experiment]        kind, seed, delta, a, eps, pairs, points, trials,
//                       horizon, samples, n, method, partition, route,
//                       c_grid, tolerance, stages
// '#' starts a comment. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace rsens
