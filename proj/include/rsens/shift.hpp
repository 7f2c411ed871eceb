#pragma once

#include "rsens/metric_system.hpp"
#include "rsens/probability.hpp"
#include "rsens/symbolic_point.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsens {

inline constexpr std::int64_t kDefaultHorizon = 1'000'000;

// The set of sequences carrying `symbols` on indices lo .. lo+size-1. An empty
// cylinder is the whole space.
class CylinderSet {
 public:
  CylinderSet() = default;
  CylinderSet(std::int64_t lo, std::vector<Symbol> symbols) : lo_(lo), symbols_(std::move(symbols)) {}

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return lo_ + static_cast<std::int64_t>(symbols_.size()) - 1; }
  std::size_t length() const noexcept { return symbols_.size(); }
  bool is_full_space() const noexcept { return symbols_.empty(); }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

  Rational measure(const ProbabilityVector& p) const;
  double log_measure(const ProbabilityVector& p) const;
  bool contains(const SymbolicPoint& x) const;

 private:
  std::int64_t lo_ = 0;
  std::vector<Symbol> symbols_;
};

// I(a, b): min{i >= 0 : a_i != b_i} one-sided, min{|i| : a_i != b_i}
// two-sided. nullopt when the points agree on every index up to `horizon`.
std::optional<std::int64_t> disagreement_index(const SymbolicPoint& a, const SymbolicPoint& b,
                                               std::int64_t horizon = kDefaultHorizon);

// d = 2^-I. When I lies beyond the horizon the value 2^-horizon is an upper
// bound and `beyond_horizon` is set.
struct ShiftDistance {
  std::int64_t exponent = 0;
  bool beyond_horizon = false;
  bool identical = false;

  double value() const { return identical ? 0.0 : std::ldexp(1.0, static_cast<int>(-exponent)); }
  Rational exact() const;
};

ShiftDistance shift_distance(const SymbolicPoint& a, const SymbolicPoint& b,
                             std::int64_t horizon = kDefaultHorizon);

// m = min{k >= 0 : 2^-k < eps}; the open ball of radius eps fixes the
// symbols with index (or |index|) at most m - 1.
std::int64_t radius_window(double eps);

CylinderSet ball_as_cylinder(const SymbolicPoint& x, double eps);
Rational cylinder_measure(const CylinderSet& c, const ProbabilityVector& p);
SymbolicPoint apply_shift(const SymbolicPoint& x);

// The integer c with 2^-c > delta >= 2^-(c+1); requires 0 < delta < 1.
int separation_class(double delta);

class ShiftSystem final : public MetricSystem {
 public:
  ShiftSystem(ProbabilityVector p, Sidedness sides, std::int64_t horizon = kDefaultHorizon);

  std::string name() const override;
  Point transform(const Point& x) const override;
  Distance distance(const Point& x, const Point& y) const override;
  BallMeasure ball_measure(const Point& x, double radius) const override;
  Point sample_point(std::uint64_t seed) const override;
  double diameter() const override { return 1.0; }

  const ProbabilityVector& measure() const noexcept { return *p_; }
  const std::shared_ptr<const ProbabilityVector>& measure_ptr() const noexcept { return p_; }
  Sidedness sidedness() const noexcept { return sides_; }
  std::int64_t horizon() const noexcept { return horizon_; }

  const SymbolicPoint& as_symbolic(const Point& x) const;

 private:
  std::shared_ptr<const ProbabilityVector> p_;
  Sidedness sides_;
  std::int64_t horizon_;
};

}  // namespace rsens
