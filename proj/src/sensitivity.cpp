#include "rsens/sensitivity.hpp"

#include "rsens/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsens {

namespace {

constexpr std::int64_t kMaxBound = std::int64_t{1} << 62;

Rational dyadic(std::int64_t exponent) {
  Rational q = 1;
  if (exponent >= 0)
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  else
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  return q;
}

std::optional<std::int64_t> min_opt(std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

std::optional<std::optional<std::int64_t>> rank_one_separation(const RankOneSystem& system, const Point& x,
                                                               double eps, double delta, std::int64_t limit) {
  const Rational& xq = system.as_rational(x);
  const Rational e = rational_from_double(eps);
  const Rational d = rational_from_double(delta);
  Rational unresolved;
  auto pieces = system.decompose({xq - e, xq + e}, &unresolved);
  // Points in spacers past the depth cannot be followed; no exact answer.
  if (unresolved > 0) return std::nullopt;
  const std::size_t cap = system.options().depth_cap;
  Rational t = xq;
  for (std::int64_t n = 0;; ++n) {
    for (const auto& p : pieces)
      if (p.interval.right > t + d || p.interval.left < t - d) return std::optional<std::int64_t>(n);
    if (n >= limit) break;
    pieces = system.advance(pieces, cap);
    auto next = system.apply(t, cap);
    if (!next) throw UndefinedAtDepth("orbit of " + format_rational(xq) + " leaves the resolved columns");
    t = *next;
  }
  return std::optional<std::optional<std::int64_t>>(std::optional<std::int64_t>{});
}

}  // namespace

void SensitivityParams::validate() const {
  if (!(std::isfinite(delta) && delta > 0)) throw std::invalid_argument("delta must be positive");
  if (!(std::isfinite(rate_a) && rate_a > 0)) throw std::invalid_argument("rate a must be positive");
}

std::int64_t time_bound(double rate_a, double log_mu) {
  const double x = -rate_a * log_mu;
  if (std::isnan(x)) throw std::invalid_argument("time bound of an undefined measure");
  if (x <= 0) return 0;
  if (!std::isfinite(x) || x >= static_cast<double>(kMaxBound)) return kMaxBound;
  return static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

std::string to_string(SensitivityKind kind) {
  return kind == SensitivityKind::restricted ? "restricted" : "restricted-pairwise";
}

void SensitivityVerdict::finalize() {
  std::size_t ok = 0;
  for (const auto& t : trials) {
    ok += t.passed ? 1 : 0;
    approximate = approximate || t.approximate;
  }
  pass_fraction = trials.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials.size());
  passed = !trials.empty() && ok == trials.size();
}

std::optional<std::int64_t> first_sensitive_time(const MetricSystem& system, const Point& x, const Point& y,
                                                 double delta, std::int64_t horizon) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  Point a = x, b = y;
  for (std::int64_t n = 0;; ++n) {
    const Distance d = system.distance(a, b);
    if (d.value > delta) return n;
    if (n == 0 && d.resolved && d.value == 0) return std::nullopt;
    if (n >= horizon) return std::nullopt;
    a = system.transform(a);
    b = system.transform(b);
  }
}

std::int64_t min_separating_time_exact(std::int64_t cylinder_length, double delta) {
  if (cylinder_length < 0) throw std::invalid_argument("cylinder length must be nonnegative");
  const int c = separation_class(delta);
  return std::max<std::int64_t>(cylinder_length - c, 0);
}

std::optional<std::optional<std::int64_t>> exact_separation_time(const MetricSystem& system, const Point& x,
                                                                 double eps, double delta, std::int64_t limit) {
  using Result = std::optional<std::optional<std::int64_t>>;
  if (const auto* shift = dynamic_cast<const ShiftSystem*>(&system)) {
    // Distances never exceed 1, and a one-letter alphabet has a single point.
    if (delta >= 1 || shift->measure().size() < 2) return Result(std::optional<std::int64_t>{});
    const auto t = min_separating_time_exact(radius_window(eps), delta);
    return Result(t <= limit ? std::optional<std::int64_t>(t) : std::nullopt);
  }
  if (const auto* rank_one = dynamic_cast<const RankOneSystem*>(&system))
    return rank_one_separation(*rank_one, x, eps, delta, limit);
  if (const auto* product = dynamic_cast<const ProductSystem*>(&system)) {
    // Under the max metric the product ball separates on a positive-measure
    // set iff one of the factors does.
    const auto& pp = as_product(x);
    const auto l = exact_separation_time(product->left(), pp.left, eps, delta, limit);
    if (!l) return std::nullopt;
    const auto r = exact_separation_time(product->right(), pp.right, eps, delta, limit);
    if (!r) return std::nullopt;
    return Result(min_opt(*l, *r));
  }
  return std::nullopt;
}

std::vector<double> dyadic_eps_grid(double delta, std::size_t count) {
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) grid.push_back(std::ldexp(delta, -static_cast<int>(k)));
  return grid;
}

SensitivityVerdict check_restricted_sensitive(const MetricSystem& system, const Point& x,
                                              const SensitivityParams& params, const std::vector<double>& eps_grid,
                                              const RestrictedOptions& options) {
  params.validate();
  if (eps_grid.empty()) throw std::invalid_argument("epsilon grid is empty");
  for (double eps : eps_grid)
    if (!(eps > 0 && eps <= params.delta))
      throw std::invalid_argument("epsilon grid values must lie in (0, delta]");

  SensitivityVerdict verdict;
  verdict.kind = SensitivityKind::restricted;
  verdict.params = params;
  const std::string label = render_point(x);
  for (double eps : eps_grid) {
    TrialRecord rec;
    rec.point = label;
    rec.radius = eps;
    const BallMeasure ball = system.ball_measure(x, eps);
    rec.ball_measure = ball.exact;
    rec.log_ball_measure = ball.log_value;
    rec.approximate = ball.approximate;
    rec.bound = time_bound(params.rate_a, ball.log_value);
    if (rec.bound > options.horizon) {
      rec.bound = options.horizon;
      rec.note = "bound capped at horizon";
    }

    if (const auto exact = exact_separation_time(system, x, eps, params.delta, rec.bound)) {
      rec.sensitive_time = *exact;
      rec.passed = exact->has_value();
    } else {
      // Rejection-sample points of the ball and look for one that separates.
      rec.approximate = true;
      std::size_t in_ball = 0;
      std::int64_t best = rec.bound;
      for (std::size_t i = 0; i < options.budget.samples; ++i) {
        const Point y = system.sample_point(derive_seed(options.budget.seed, i));
        if (!(system.distance(x, y).value < eps)) continue;
        ++in_ball;
        if (const auto t = first_sensitive_time(system, x, y, params.delta, best)) {
          rec.sensitive_time = *t;
          best = *t;
          if (best == 0) break;
        }
      }
      rec.passed = rec.sensitive_time.has_value();
      const std::string counts = std::to_string(in_ball) + " of " + std::to_string(options.budget.samples) +
                                 " samples in ball";
      rec.note = rec.passed ? counts : "not detected within sampling budget (" + counts + ")";
    }
    verdict.trials.push_back(std::move(rec));
  }
  verdict.finalize();
  return verdict;
}

SensitivityVerdict check_restricted_sensitive_sampled(const MetricSystem& system, const SensitivityParams& params,
                                                      const std::vector<double>& eps_grid, std::size_t points,
                                                      std::uint64_t seed, const RestrictedOptions& options) {
  SensitivityVerdict all;
  all.kind = SensitivityKind::restricted;
  all.params = params;
  for (std::size_t i = 0; i < points; ++i) {
    const Point x = system.sample_point(derive_seed(seed, i));
    auto v = check_restricted_sensitive(system, x, params, eps_grid, options);
    for (auto& t : v.trials) all.trials.push_back(std::move(t));
  }
  all.finalize();
  return all;
}

std::optional<TrialRecord> check_pair(const MetricSystem& system, const Point& x, const Point& y,
                                      const SensitivityParams& params, std::int64_t horizon) {
  params.validate();
  const Distance d = system.distance(x, y);
  if (!d.resolved || d.value == 0) return std::nullopt;
  TrialRecord rec;
  rec.point = render_point(x);
  rec.other = render_point(y);
  rec.radius = d.value;
  const BallMeasure ball = system.ball_measure(x, d.value);
  rec.ball_measure = ball.exact;
  rec.log_ball_measure = ball.log_value;
  rec.approximate = ball.approximate;
  rec.bound = time_bound(params.rate_a, ball.log_value);
  if (rec.bound > horizon) {
    rec.bound = horizon;
    rec.note = "bound capped at horizon";
  }
  rec.sensitive_time = first_sensitive_time(system, x, y, params.delta, rec.bound);
  rec.passed = rec.sensitive_time.has_value();
  return rec;
}

SensitivityVerdict check_restricted_pairwise(const MetricSystem& system, const SensitivityParams& params,
                                             std::size_t pairs, std::uint64_t seed, std::int64_t horizon) {
  params.validate();
  if (pairs == 0) throw std::invalid_argument("pair count must be at least 1");
  SensitivityVerdict verdict;
  verdict.kind = SensitivityKind::restricted_pairwise;
  verdict.params = params;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Point x = system.sample_point(derive_seed(seed, 2 * i));
    const Point y = system.sample_point(derive_seed(seed, 2 * i + 1));
    if (auto rec = check_pair(system, x, y, params, horizon))
      verdict.trials.push_back(std::move(*rec));
    else
      ++verdict.excluded;
  }
  verdict.finalize();
  return verdict;
}

// ---------------------------------------------------------------------------

RpsFailureWitness witness_two_sided_failure(const SymbolicPoint& sigma, double delta, double rate_a) {
  if (sigma.sidedness() != Sidedness::two_sided) throw std::invalid_argument("base point must be two-sided");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(std::isfinite(rate_a) && rate_a > 0)) throw std::invalid_argument("rate a must be positive");
  const ProbabilityVector& p = sigma.measure();
  if (p.size() < 2) throw std::invalid_argument("alphabet needs at least two symbols");

  RpsFailureWitness w;
  w.base_point = sigma.render();
  w.k1 = 1;
  while (std::ldexp(1.0, static_cast<int>(-w.k1)) >= delta) ++w.k1;

  // Every tau in the cylinder is at distance exactly 2^-k1 from sigma, and
  // the open ball of that radius fixes |i| <= k1.
  const CylinderSet ball(-w.k1, sigma.symbols(-w.k1, 2 * w.k1 + 1));
  w.ball_measure = ball.measure(p);
  const double log_p = log_rational(w.ball_measure);
  w.bound = time_bound(rate_a, log_p);
  const double target = -std::log2(delta);
  w.k2 = w.k1 + 1;
  while (!(w.k2 + rate_a * log_p > target) || w.k2 <= w.bound) ++w.k2;

  std::vector<Symbol> cyl = sigma.symbols(-w.k1, w.k1 + w.k2 + 1);
  const Symbol s = cyl.front();
  cyl.front() = s == 1 ? 2 : 1;
  w.cylinder = CylinderSet(-w.k1, cyl);

  while (std::ldexp(1.0, static_cast<int>(-(w.relevant_radius + 1))) >= delta) ++w.relevant_radius;
  const Rational dq = rational_from_double(delta);
  const auto n_symbols = static_cast<Symbol>(p.size());
  enum class Slot { equal, differ, free };
  auto slot = [&](std::int64_t j) {
    if (j == -w.k1) return Slot::differ;
    if (j > -w.k1 && j <= w.k2) return Slot::equal;
    return Slot::free;
  };

  w.verified = true;
  w.max_distance = 0;
  for (std::int64_t n = 0; n <= w.bound; ++n) {
    WitnessRow row;
    row.n = n;
    row.bound = w.bound;
    row.distance = dyadic(std::min(n + w.k1, w.k2 + 1 - n));
    row.reference = std::max(dyadic(w.k1), dyadic(w.k2 - n));

    // d(T^n sigma, T^n tau) >= delta iff tau and sigma differ somewhere in
    // n - K .. n + K; enumerate every admissible tau on that window.
    const std::int64_t lo = n - w.relevant_radius, hi = n + w.relevant_radius;
    std::vector<std::int64_t> free_slots;
    bool violated = false;
    for (std::int64_t j = lo; j <= hi; ++j) {
      if (slot(j) == Slot::free) free_slots.push_back(j);
      if (slot(j) == Slot::differ) violated = true;
    }
    std::vector<Symbol> choice(free_slots.size(), 1);
    while (true) {
      ++w.enumerated;
      for (std::size_t k = 0; k < free_slots.size() && !violated; ++k)
        violated = choice[k] != sigma.at(free_slots[k]);
      if (violated) break;
      std::size_t k = 0;
      while (k < choice.size() && choice[k] == n_symbols) choice[k++] = 1;
      if (k == choice.size()) break;
      ++choice[k];
    }
    row.below_delta = !violated && row.distance < dq;
    w.verified = w.verified && row.below_delta;
    if (row.distance > w.max_distance) w.max_distance = row.distance;
    w.rows.push_back(std::move(row));
  }
  return w;
}

std::string to_string(RankOneRoute route) {
  return route == RankOneRoute::lower_bound ? "lower-bound" : "measure-preserving";
}

RankOneRoute parse_rank_one_route(std::string_view text) {
  if (text == "lower-bound") return RankOneRoute::lower_bound;
  if (text == "measure-preserving") return RankOneRoute::measure_preserving;
  throw std::invalid_argument("unknown route '" + std::string(text) + "'");
}

RankOneFailureWitness witness_rank_one_failure(const RankOneSystem& system, double delta, double rate_a,
                                               RankOneRoute route) {
  SensitivityParams{delta, rate_a}.validate();
  const RankOneSpec& spec = system.spec();
  if (route == RankOneRoute::measure_preserving && !spec.measure_preserving())
    throw std::invalid_argument("measure-preserving route needs uniform proportions");
  const Rational c = spec.proportion_lower_bound();
  const double log_w0 = log_rational(spec.initial_width);
  const Rational dq = rational_from_double(delta);

  std::string last_reason = "no stage has levels narrower than delta";
  for (std::size_t n = 1; n < system.depth(); ++n) {
    if (system.max_width(n) >= dq) continue;
    const BigInt& h = system.height(n);
    double lhs = 0, rhs = 0;
    if (route == RankOneRoute::lower_bound) {
      lhs = rate_a * (static_cast<double>(n) * -log_rational(c) + std::log(1.5) - log_w0);
      rhs = std::ldexp(1.0, static_cast<int>(n) - 1);
    } else {
      // h_0 = 1.
      lhs = rate_a * (std::log(1.5) + log_bigint(h) - log_w0);
      rhs = std::exp(log_bigint(h)) / 2;
    }
    if (!(lhs < rhs)) {
      last_reason = "stage " + std::to_string(n) + ": inequality " + std::to_string(lhs) + " < " +
                    std::to_string(rhs) + " fails";
      continue;
    }
    const RationalInterval sub = system.sublevel(system.level(n, 0), n, 0);
    RankOneFailureWitness w;
    w.route = route;
    w.stage = n;
    w.height = h;
    w.proportion_bound = c;
    w.inequality_lhs = lhs;
    w.inequality_rhs = rhs;
    w.w = sub.length() / 2;
    w.x = sub.left + w.w;
    w.ball_measure = system.lebesgue_ball_measure(w.x, w.w) / system.total_measure();
    w.bound = time_bound(rate_a, log_rational(w.ball_measure));
    if (!(2 * BigInt(w.bound) < h && BigInt(w.bound) < h - 1)) {
      last_reason = "stage " + std::to_string(n) + ": bound " + std::to_string(w.bound) + " too close to height";
      continue;
    }

    Rational unresolved;
    auto pieces = system.decompose({w.x - w.w, w.x + w.w}, &unresolved);
    if (unresolved > 0) throw UndefinedAtDepth("witness ball reaches unresolved spacers");
    w.verified = true;
    w.max_diameter = 0;
    for (std::int64_t t = 0; t <= w.bound; ++t) {
      if (t > 0) pieces = system.advance(pieces, system.depth());
      Rational lo = pieces.front().interval.left, hi = pieces.front().interval.right;
      for (const auto& piece : pieces) {
        lo = std::min(lo, piece.interval.left);
        hi = std::max(hi, piece.interval.right);
      }
      WitnessRow row;
      row.n = t;
      row.bound = w.bound;
      row.distance = hi - lo;
      row.below_delta = row.distance < dq;
      w.verified = w.verified && row.below_delta;
      if (row.distance > w.max_diameter) w.max_diameter = row.distance;
      w.rows.push_back(std::move(row));
    }
    return w;
  }
  throw std::runtime_error("no witness stage up to depth " + std::to_string(system.depth()) + "; last: " +
                           last_reason);
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> default_c_grid(std::int64_t horizon) {
  std::vector<std::int64_t> grid{0};
  for (std::int64_t c = 1; c <= horizon / 64; c *= 2) grid.push_back(c);
  return grid;
}

RateEstimate estimate_min_asymptotic_rate(const ShiftSystem& system, const SymbolicPoint& sigma,
                                          std::int64_t horizon, std::vector<std::int64_t> c_grid) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (c_grid.empty()) c_grid = default_c_grid(horizon);
  for (auto c : c_grid)
    if (c < 0 || c >= horizon) throw std::invalid_argument("c-grid values must lie in [0, horizon)");
  if (!(sigma.measure() == system.measure())) throw std::invalid_argument("point belongs to another shift");

  std::vector<long double> prefix(static_cast<std::size_t>(horizon) + 1, 0.0L);
  const ProbabilityVector& p = system.measure();
  for (std::int64_t t = 0; t < horizon; ++t)
    prefix[static_cast<std::size_t>(t) + 1] = prefix[static_cast<std::size_t>(t)] - p.log_of(sigma.at(t));

  RateEstimate out;
  out.point = sigma.render();
  out.horizon = horizon;
  out.c_grid = c_grid;
  long double sup = 0;
  for (auto c : c_grid) {
    long double inf = std::numeric_limits<long double>::infinity();
    for (std::int64_t n = c + 1; n <= horizon; ++n)
      inf = std::min(inf, prefix[static_cast<std::size_t>(n)] / static_cast<long double>(n - c));
    out.inf_by_c.push_back(static_cast<double>(inf));
    sup = std::max(sup, inf);
  }
  out.reciprocal = static_cast<double>(sup);
  out.estimate = static_cast<double>(1.0L / sup);
  return out;
}

}  // namespace rsens
