#include "rsens/metric_system.hpp"

#include "rsens/random.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rsens {

namespace {
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
}

Point make_product_point(Point left, Point right) {
  return std::make_shared<const ProductPoint>(ProductPoint{std::move(left), std::move(right)});
}

const ProductPoint& as_product(const Point& p) {
  const auto* pp = std::get_if<std::shared_ptr<const ProductPoint>>(&p);
  if (!pp || !*pp) throw std::invalid_argument("not a product point");
  return **pp;
}

std::string render_point(const Point& p) {
  struct Renderer {
    std::string operator()(const SymbolicPoint& s) const { return s.render(); }
    std::string operator()(const Rational& q) const { return format_rational(q); }
    std::string operator()(double x) const {
      std::ostringstream os;
      os.precision(12);
      os << x;
      return os.str();
    }
    std::string operator()(const std::shared_ptr<const ProductPoint>& pp) const {
      return "(" + render_point(pp->left) + ", " + render_point(pp->right) + ")";
    }
  };
  return std::visit(Renderer{}, p);
}

BallMeasure BallMeasure::from_exact(Rational q) {
  if (q <= 0 || q > 1) throw std::domain_error("ball measure outside (0, 1]: " + format_rational(q));
  BallMeasure m;
  m.log_value = log_rational(q);
  m.exact = std::move(q);
  return m;
}

BallMeasure BallMeasure::estimated(std::size_t hits, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("Monte Carlo estimate without samples");
  BallMeasure m;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  m.log_value = hits ? std::log(p) : -std::numeric_limits<double>::infinity();
  m.approximate = true;
  m.samples = samples;
  m.half_width = kZ99 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return m;
}

BallMeasure monte_carlo_ball_measure(const MetricSystem& system, const Point& x, double radius,
                                     const SamplingBudget& budget) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < budget.samples; ++k) {
    const Point y = system.sample_point(derive_seed(budget.seed, k));
    if (system.distance(x, y).value < radius) ++hits;
  }
  return BallMeasure::estimated(hits, budget.samples);
}

// ---------------------------------------------------------------------------
// ProductSystem

ProductSystem::ProductSystem(SystemPtr left, SystemPtr right, SamplingBudget budget)
    : left_(std::move(left)), right_(std::move(right)), budget_(budget) {
  if (!left_ || !right_) throw std::invalid_argument("product of a missing system");
}

std::string ProductSystem::name() const { return "(" + left_->name() + ") x (" + right_->name() + ")"; }

Point ProductSystem::transform(const Point& p) const {
  const auto& pp = as_product(p);
  return make_product_point(left_->transform(pp.left), right_->transform(pp.right));
}

Point ProductSystem::sample_point(std::uint64_t seed) const {
  const auto [l, r] = split_seed(seed);
  return make_product_point(left_->sample_point(l), right_->sample_point(r));
}

double ProductSystem::diameter() const { return std::max(left_->diameter(), right_->diameter()); }

Distance ProductSystem::max_metric_distance(const Point& p, const Point& q) const {
  const auto& a = as_product(p);
  const auto& b = as_product(q);
  const Distance dl = left_->distance(a.left, b.left);
  const Distance dr = right_->distance(a.right, b.right);
  Distance d{std::max(dl.value, dr.value), dl.resolved && dr.resolved};
  // An unresolved component is an upper bound; a resolved component at least
  // that large still pins the maximum exactly.
  if (!d.resolved) d.resolved = (dl.resolved && dl.value >= dr.value) || (dr.resolved && dr.value >= dl.value);
  return d;
}

BallMeasure ProductSystem::product_ball_measure(const Point& p, double radius) const {
  const auto& pp = as_product(p);
  if (has_exact_ball_measure()) {
    const BallMeasure l = left_->ball_measure(pp.left, radius);
    const BallMeasure r = right_->ball_measure(pp.right, radius);
    if (l.exact && r.exact) return BallMeasure::from_exact(*l.exact * *r.exact);
  }
  return monte_carlo_ball_measure(*this, p, radius, budget_);
}

SystemPtr product_system(SystemPtr left, SystemPtr right) {
  return std::make_shared<const ProductSystem>(std::move(left), std::move(right));
}

// ---------------------------------------------------------------------------
// CircleRotation

CircleRotation::CircleRotation(double alpha) : alpha_(alpha - std::floor(alpha)) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("rotation angle must be finite");
}

std::string CircleRotation::name() const {
  std::ostringstream os;
  os.precision(12);
  os << "circle rotation alpha=" << alpha_;
  return os.str();
}

Point CircleRotation::transform(const Point& x) const {
  double y = std::get<double>(x) + alpha_;
  if (y >= 1.0) y -= 1.0;
  return y;
}

Distance CircleRotation::distance(const Point& x, const Point& y) const {
  const double d = std::fabs(std::get<double>(x) - std::get<double>(y));
  return {std::min(d, 1.0 - d), true};
}

BallMeasure CircleRotation::ball_measure(const Point&, double radius) const {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (radius >= 0.5) return BallMeasure::from_exact(Rational(1));
  return BallMeasure::from_exact(rational_from_double(radius) * 2);
}

Point CircleRotation::sample_point(std::uint64_t seed) const { return SplitMix(mix64(seed)).uniform(); }

// ---------------------------------------------------------------------------
// SampledBallSystem

SampledBallSystem::SampledBallSystem(SystemPtr inner, SamplingBudget budget)
    : inner_(std::move(inner)), budget_(budget) {
  if (!inner_) throw std::invalid_argument("missing system");
}

BallMeasure SampledBallSystem::ball_measure(const Point& x, double radius) const {
  return monte_carlo_ball_measure(*this, x, radius, budget_);
}

}  // namespace rsens
