#pragma once

#include "rsens/metric_system.hpp"
#include "rsens/rank_one.hpp"
#include "rsens/shift.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsens {

struct SensitivityParams {
  double delta = 0.5;   // separation threshold
  double rate_a = 1.0;  // time bound coefficient

  // Throws std::invalid_argument unless both are finite and positive.
  void validate() const;
};

// floor(-a * log_mu). A relative slack of 1e-9 absorbs rounding in the
// logarithm, so that e.g. a = 1/log 2 and mu = 2^-k give exactly k.
std::int64_t time_bound(double rate_a, double log_mu);

enum class SensitivityKind { restricted, restricted_pairwise };
std::string to_string(SensitivityKind kind);

struct TrialRecord {
  std::string point;
  std::string other;  // second point of a pair; empty for restricted checks
  double radius = 0.0;  // epsilon, or d(x, y) for pairs
  std::optional<Rational> ball_measure;  // exact when available
  double log_ball_measure = 0.0;
  std::int64_t bound = 0;
  std::optional<std::int64_t> sensitive_time;
  bool passed = false;
  bool approximate = false;
  std::string note;
};

struct SensitivityVerdict {
  SensitivityKind kind = SensitivityKind::restricted;
  SensitivityParams params;
  std::vector<TrialRecord> trials;
  std::size_t excluded = 0;  // degenerate or unresolvable pairs
  double pass_fraction = 0.0;
  bool approximate = false;
  bool passed = false;

  // Recomputes pass_fraction / passed / approximate from the trials.
  void finalize();
};

// Minimal n <= horizon with d(T^n x, T^n y) > delta, or nullopt. Returns 0
// when d(x, y) > delta already and nullopt at once when d(x, y) = 0.
// UndefinedAtDepth from rank-one systems propagates.
std::optional<std::int64_t> first_sensitive_time(const MetricSystem& system, const Point& x, const Point& y,
                                                 double delta, std::int64_t horizon);

// For a shift ball fixing `cylinder_length` coordinates (m) and 0 < delta < 1
// with class c: the earliest time at which a positive-measure part of the ball
// is more than delta away from the centre, i.e. max(m - c, 0). Applies to one-
// and two-sided shifts alike.
std::int64_t min_separating_time_exact(std::int64_t cylinder_length, double delta);

// Earliest n <= limit at which a positive-measure subset of B_eps(x)
// delta-separates from x, computed without sampling. The outer optional is
// empty when the system has no exact path.
std::optional<std::optional<std::int64_t>> exact_separation_time(const MetricSystem& system, const Point& x,
                                                                 double eps, double delta, std::int64_t limit);

struct RestrictedOptions {
  std::int64_t horizon = 1'000'000;  // hard cap on the time bound
  SamplingBudget budget;             // used only on systems without an exact path
};

// Definition-level check at one point over an epsilon grid. Each grid value
// must satisfy 0 < eps <= delta.
SensitivityVerdict check_restricted_sensitive(const MetricSystem& system, const Point& x,
                                              const SensitivityParams& params, const std::vector<double>& eps_grid,
                                              const RestrictedOptions& options = {});

// The same check at `points` points sampled from the system; trial records
// carry one row per (point, eps).
SensitivityVerdict check_restricted_sensitive_sampled(const MetricSystem& system, const SensitivityParams& params,
                                                      const std::vector<double>& eps_grid, std::size_t points,
                                                      std::uint64_t seed, const RestrictedOptions& options = {});

// eps_k = delta * 2^-k for k = 0 .. count-1.
std::vector<double> dyadic_eps_grid(double delta, std::size_t count);

// Samples i.i.d. pairs and checks first_sensitive_time(x, y) <= bound(x, d(x, y)).
// Identical pairs and pairs whose distance is not resolved within the horizon
// are excluded and counted.
SensitivityVerdict check_restricted_pairwise(const MetricSystem& system, const SensitivityParams& params,
                                             std::size_t pairs, std::uint64_t seed,
                                             std::int64_t horizon = 1'000'000);
// The same check on one given pair; nullopt when the pair is excluded.
std::optional<TrialRecord> check_pair(const MetricSystem& system, const Point& x, const Point& y,
                                      const SensitivityParams& params, std::int64_t horizon = 1'000'000);

// ---------------------------------------------------------------------------
// Failure witnesses

struct WitnessRow {
  std::int64_t n = 0;
  std::int64_t bound = 0;
  Rational distance;  // largest distance observed at time n
  std::optional<Rational> reference;  // a-priori upper bound, when one is known
  bool below_delta = false;
};

struct RpsFailureWitness {
  std::string base_point;
  CylinderSet cylinder;  // every tau in it differs from sigma at -k1 only inside the window
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  Rational ball_measure;  // exact mu B_{2^-k1}(sigma)
  std::int64_t bound = 0;
  std::int64_t relevant_radius = 0;  // |i| <= this decides d >= delta
  std::size_t enumerated = 0;        // tau windows checked exhaustively
  std::vector<WitnessRow> rows;      // n = 0 .. bound
  Rational max_distance;
  bool verified = false;
};

// Two-sided shift, 0 < delta < 1, a > 0. The base point must be two-sided.
RpsFailureWitness witness_two_sided_failure(const SymbolicPoint& sigma, double delta, double rate_a);

enum class RankOneRoute { lower_bound, measure_preserving };
std::string to_string(RankOneRoute route);
RankOneRoute parse_rank_one_route(std::string_view text);

struct RankOneFailureWitness {
  RankOneRoute route = RankOneRoute::lower_bound;
  std::size_t stage = 0;  // n_k
  BigInt height;          // h_{n_k}
  Rational proportion_bound;  // c
  double inequality_lhs = 0.0;
  double inequality_rhs = 0.0;
  Rational x;
  Rational w;
  Rational ball_measure;  // normalised lambda B_w(x)
  std::int64_t bound = 0;
  std::vector<WitnessRow> rows;  // n = 0 .. bound, distance = diameter of T^n B_w(x)
  Rational max_diameter;
  bool verified = false;
};

// Throws std::runtime_error with diagnostics if no stage up to the system's
// depth satisfies the conditions.
RankOneFailureWitness witness_rank_one_failure(const RankOneSystem& system, double delta, double rate_a,
                                               RankOneRoute route = RankOneRoute::lower_bound);

// ---------------------------------------------------------------------------
// Minimal asymptotic rate

struct RateEstimate {
  std::string point;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> c_grid;
  std::vector<double> inf_by_c;  // min over c < n <= N of S_n / (n - c)
  double estimate = 0.0;    // a*
  double reciprocal = 0.0;  // 1 / a*, comparable with the entropy
};

// {0} plus powers of two up to horizon / 64.
std::vector<std::int64_t> default_c_grid(std::int64_t horizon);

// With S_n = sum_{t < n} -log p(sigma_t): a* = (max_c min_{c < n <= N} S_n / (n - c))^-1.
RateEstimate estimate_min_asymptotic_rate(const ShiftSystem& system, const SymbolicPoint& sigma,
                                          std::int64_t horizon, std::vector<std::int64_t> c_grid = {});

}  // namespace rsens
