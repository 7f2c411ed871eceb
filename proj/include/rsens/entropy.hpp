#pragma once

#include "rsens/metric_system.hpp"
#include "rsens/shift.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsens {

enum class EntropyMethod { analytic, birkhoff_frequency, brin_katok, partition };
std::string to_string(EntropyMethod method);

// All values in nats.
struct EntropyEstimate {
  EntropyMethod method = EntropyMethod::analytic;
  double value = 0.0;
  std::int64_t horizon = 0;  // n
  double delta = 0.0;        // Bowen ball radius (brin-katok only)
  std::size_t samples = 0;   // 0 when computed exactly
  double half_width = 0.0;   // 99% confidence half-width when sampled
  std::optional<Rational> exact_measure;  // mu C(x, n, delta) when exact
  bool approximate = false;
  // Monte Carlo saw no hits; `value` is then only a lower bound.
  bool inconclusive = false;
  std::string note;
};

// -sum p_i log p_i, accumulated in long double.
long double bernoulli_entropy(const ProbabilityVector& p);
EntropyEstimate analytic_entropy(const ProbabilityVector& p);

// (1/n) sum_i -k_i log p_i with k_i the number of i's among sigma_0 .. sigma_{n-1}.
EntropyEstimate birkhoff_frequency_entropy(const ShiftSystem& system, const SymbolicPoint& sigma, std::int64_t n);

// -(1/n) log mu C(x, n, delta), C(x, n, delta) = {y : d(T^i x, T^i y) <= delta
// for 0 <= i < n}. Exact on shifts, where the Bowen ball is a cylinder;
// sampled on other systems.
EntropyEstimate brin_katok_estimate(const MetricSystem& system, const Point& x, double delta, std::int64_t n,
                                    const SamplingBudget& budget = {});

// The cylinder C(x, n, delta) on a shift.
CylinderSet bowen_cylinder(const SymbolicPoint& x, double delta, std::int64_t n);

struct PartitionSpec {
  enum class Kind { symbol, intervals };
  Kind kind = Kind::symbol;
  // For intervals: cells [0, c_1), [c_1, c_2), ..., [c_k, total).
  std::vector<Rational> cuts;

  static PartitionSpec symbols() { return {}; }
  static PartitionSpec intervals(std::vector<Rational> cuts);
  std::size_t cell_of(const Point& x) const;
  std::string to_string() const;
};

// (1/(n+1)) E[-log mu C_n(x)] where C_n(x) is the cell of x in the join of
// T^-i A for i = 0 .. n. On shifts with the symbol partition the itinerary
// cylinders are exact: every word is enumerated when N^(n+1) fits in the
// budget, otherwise x is sampled. Elsewhere cell measures are sampled too.
EntropyEstimate partition_entropy(const MetricSystem& system, const PartitionSpec& partition, std::int64_t n,
                                  const SamplingBudget& budget = {});

// sup d(x, y) over x, y in one cell of the symbol partition.
double symbol_partition_diameter(const ShiftSystem& system);

}  // namespace rsens
