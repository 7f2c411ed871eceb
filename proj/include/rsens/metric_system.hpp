#pragma once

#include "rsens/rational.hpp"
#include "rsens/symbolic_point.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace rsens {

struct ProductPoint;

// A point of any registered system: symbol sequence (shifts), exact rational
// (rank-one), real (circle rotation) or a pair (products).
using Point = std::variant<SymbolicPoint, Rational, double, std::shared_ptr<const ProductPoint>>;

struct ProductPoint {
  Point left;
  Point right;
};

Point make_product_point(Point left, Point right);
const ProductPoint& as_product(const Point& p);

std::string render_point(const Point& p);

struct Distance {
  double value = 0.0;
  // False when the value is only an upper bound (shift points that agree on
  // the whole inspected horizon).
  bool resolved = true;
};

// Measure of an open ball B_r(x) = {y : d(x, y) < r}.
struct BallMeasure {
  std::optional<Rational> exact;
  double log_value = 0.0;  // natural log; -inf for an empty Monte Carlo estimate
  bool approximate = false;
  std::size_t samples = 0;
  double half_width = 0.0;  // 99% confidence half-width on the value (Monte Carlo only)

  double value() const { return std::exp(log_value); }

  static BallMeasure from_exact(Rational q);
  static BallMeasure estimated(std::size_t hits, std::size_t samples);
};

struct SamplingBudget {
  std::size_t samples = 20000;
  std::uint64_t seed = 0x5EEDULL;
};

// A probability space with a metric and a transformation. Implementations are
// immutable after construction and every member is safe to call concurrently.
class MetricSystem {
 public:
  virtual ~MetricSystem() = default;

  virtual std::string name() const = 0;
  virtual Point transform(const Point& x) const = 0;
  virtual Distance distance(const Point& x, const Point& y) const = 0;
  virtual BallMeasure ball_measure(const Point& x, double radius) const = 0;
  // Draws from the system's probability measure; deterministic in `seed`.
  virtual Point sample_point(std::uint64_t seed) const = 0;
  // Supremum of the metric.
  virtual double diameter() const = 0;
  virtual bool has_exact_ball_measure() const { return true; }
};

using SystemPtr = std::shared_ptr<const MetricSystem>;

// Monte Carlo estimate of the measure of B_r(x) by sampling the system.
BallMeasure monte_carlo_ball_measure(const MetricSystem& system, const Point& x, double radius,
                                     const SamplingBudget& budget);

// X x Y with T x S and the max metric.
class ProductSystem final : public MetricSystem {
 public:
  ProductSystem(SystemPtr left, SystemPtr right, SamplingBudget budget = {});

  std::string name() const override;
  Point transform(const Point& p) const override;
  Distance distance(const Point& p, const Point& q) const override { return max_metric_distance(p, q); }
  BallMeasure ball_measure(const Point& p, double radius) const override {
    return product_ball_measure(p, radius);
  }
  // The seed is split with split_seed() into independent component seeds.
  Point sample_point(std::uint64_t seed) const override;
  double diameter() const override;
  bool has_exact_ball_measure() const override {
    return left_->has_exact_ball_measure() && right_->has_exact_ball_measure();
  }

  // max(d_X(x1, x2), d_Y(y1, y2)).
  Distance max_metric_distance(const Point& p, const Point& q) const;

  // mu(B_r(x)) * nu(B_r(y)). When a factor has no exact ball measure the
  // product ball is estimated by sampling instead and flagged approximate.
  BallMeasure product_ball_measure(const Point& p, double radius) const;

  const MetricSystem& left() const noexcept { return *left_; }
  const MetricSystem& right() const noexcept { return *right_; }

 private:
  SystemPtr left_;
  SystemPtr right_;
  SamplingBudget budget_;
};

SystemPtr product_system(SystemPtr left, SystemPtr right);

// x -> x + alpha mod 1 on the circle with the arc metric. An isometry, used as
// the non-sensitive factor in product experiments.
class CircleRotation final : public MetricSystem {
 public:
  explicit CircleRotation(double alpha);

  std::string name() const override;
  Point transform(const Point& x) const override;
  Distance distance(const Point& x, const Point& y) const override;
  BallMeasure ball_measure(const Point& x, double radius) const override;
  Point sample_point(std::uint64_t seed) const override;
  double diameter() const override { return 0.5; }

  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

// Hides the exact ball measure of the wrapped system so that every consumer
// falls back to sampling. Used to exercise the approximate code paths.
class SampledBallSystem final : public MetricSystem {
 public:
  SampledBallSystem(SystemPtr inner, SamplingBudget budget);

  std::string name() const override { return inner_->name() + " (sampled balls)"; }
  Point transform(const Point& x) const override { return inner_->transform(x); }
  Distance distance(const Point& x, const Point& y) const override { return inner_->distance(x, y); }
  BallMeasure ball_measure(const Point& x, double radius) const override;
  Point sample_point(std::uint64_t seed) const override { return inner_->sample_point(seed); }
  double diameter() const override { return inner_->diameter(); }
  bool has_exact_ball_measure() const override { return false; }

 private:
  SystemPtr inner_;
  SamplingBudget budget_;
};

}  // namespace rsens
