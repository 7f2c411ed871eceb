#include "rsens/random.hpp"
#include "rsens/sensitivity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace rsens;

namespace {

std::shared_ptr<const ShiftSystem> shift(const char* p, Sidedness sides) {
  return std::make_shared<const ShiftSystem>(ProbabilityVector::parse(p), sides);
}

Point word(const ShiftSystem& s, std::vector<Symbol> w, Symbol tail = 1) {
  return SymbolicPoint::with_window(s.measure_ptr(), s.sidedness(), 0, std::move(w),
                                    SymbolicPoint::Tail::constant(tail));
}

// Earliest n at which some extension y of the length-m prefix of x has its
// first disagreement with x after time n at an index j with 2^-j > delta.
// Words are explicit bit patterns; nothing from the library is consulted.
std::int64_t brute_separation(unsigned prefix, int m, double delta) {
  constexpr int kExtra = 5;
  const int len = m + kExtra;
  for (int n = 0; n <= m + 1; ++n) {
    for (unsigned ext = 0; ext < (1u << kExtra); ++ext) {
      // x is the prefix followed by zeros; y the prefix followed by ext.
      const std::uint64_t x = prefix;
      const std::uint64_t y = prefix | (static_cast<std::uint64_t>(ext) << m);
      for (int i = n; i < len; ++i) {
        const bool differ = (((x ^ y) >> i) & 1u) != 0;
        if (!differ) continue;
        if (std::ldexp(1.0, -(i - n)) > delta) return n;
        break;
      }
    }
  }
  return -1;
}

}  // namespace

TEST(TimeBound, FloorWithSlack) {
  const double a = 1.0 / std::log(2.0);
  for (int k = 0; k < 60; ++k) EXPECT_EQ(time_bound(a, -k * std::log(2.0)), k);
  EXPECT_EQ(time_bound(2.0, std::log(0.3)), 2);
  EXPECT_EQ(time_bound(1.0, 0.0), 0);
  EXPECT_EQ(time_bound(1e30, -1e30), std::int64_t{1} << 62);
}

TEST(Params, Validation) {
  EXPECT_THROW((SensitivityParams{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((SensitivityParams{0.5, -1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((SensitivityParams{0.5, NAN}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((SensitivityParams{0.5, 1.0}.validate()));
}

TEST(FirstSensitiveTime, Examples) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const Point x = word(*sys, {1, 1, 1, 1, 1, 1});
  EXPECT_EQ(first_sensitive_time(*sys, x, word(*sys, {2}), 0.5, 100), 0);
  for (int n = 0; n < 6; ++n) {
    std::vector<Symbol> w(6, 1);
    w[n] = 2;
    EXPECT_EQ(first_sensitive_time(*sys, x, word(*sys, w), 0.5, 100), n);
  }
  EXPECT_FALSE(first_sensitive_time(*sys, x, x, 0.5, 1000).has_value());
  EXPECT_FALSE(first_sensitive_time(*sys, x, x, 0.5, 0).has_value());
  std::vector<Symbol> w(6, 1);
  w[5] = 2;
  EXPECT_FALSE(first_sensitive_time(*sys, x, word(*sys, w), 0.5, 4).has_value());
}

TEST(FirstSensitiveTime, MonotoneInDelta) {
  const auto sys = shift("1/3,2/3", Sidedness::two_sided);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Point x = sys->sample_point(derive_seed(s, 0));
    const Point y = sys->sample_point(derive_seed(s, 1));
    std::int64_t prev = -1;
    for (double delta : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
      const auto t = first_sensitive_time(*sys, x, y, delta, 10000);
      ASSERT_TRUE(t.has_value());
      EXPECT_GE(*t, prev);
      prev = *t;
    }
  }
}

TEST(MinSeparatingTime, Examples) {
  EXPECT_EQ(min_separating_time_exact(5, 0.5), 5);
  EXPECT_EQ(min_separating_time_exact(5, 0.25), 4);
  EXPECT_EQ(min_separating_time_exact(3, 0.3), 2);
  EXPECT_EQ(min_separating_time_exact(1, 0.2), 0);
  EXPECT_EQ(min_separating_time_exact(0, 0.9), 0);
}

TEST(MinSeparatingTime, MatchesBruteForce) {
  for (int m = 0; m <= 12; ++m) {
    for (int c = 0; c <= 3; ++c) {
      const double hi = std::ldexp(1.0, -c);
      for (double delta : {hi / 2, hi * 0.6, hi * 0.99}) {
        const auto expected = min_separating_time_exact(m, delta);
        for (unsigned prefix = 0; prefix < (1u << m); ++prefix)
          ASSERT_EQ(brute_separation(prefix, m, delta), expected) << "m=" << m << " delta=" << delta;
      }
    }
  }
}

TEST(ExactSeparation, ShiftUsesCylinderAlgebra) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const Point x = sys->sample_point(3);
  const auto t = exact_separation_time(*sys, x, 1.0 / 32, 0.25, 100);
  ASSERT_TRUE(t.has_value());
  ASSERT_TRUE(t->has_value());
  EXPECT_EQ(**t, min_separating_time_exact(radius_window(1.0 / 32), 0.25));
  const auto none = exact_separation_time(*sys, x, 1.0 / 32, 0.25, 2);
  ASSERT_TRUE(none.has_value());
  EXPECT_FALSE(none->has_value());
  CircleRotation rot(0.3);
  EXPECT_FALSE(exact_separation_time(rot, Point{0.1}, 0.1, 0.2, 10).has_value());
}

TEST(RestrictedSensitive, UniformOneSidedPasses) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const SensitivityParams params{0.5, 1.0 / std::log(2.0) + 1e-3};
  const auto v = check_restricted_sensitive_sampled(*sys, params, dyadic_eps_grid(0.5, 12), 30, 5);
  EXPECT_TRUE(v.passed);
  EXPECT_FALSE(v.approximate);
  EXPECT_EQ(v.trials.size(), 360u);
  EXPECT_EQ(v.pass_fraction, 1.0);
}

TEST(RestrictedSensitive, TwoSidedQuarterPasses) {
  const auto sys = shift("1/2,1/2", Sidedness::two_sided);
  const SensitivityParams params{0.25, 1.0 / (2 * std::log(2.0))};
  EXPECT_TRUE(check_restricted_sensitive_sampled(*sys, params, dyadic_eps_grid(0.25, 10), 30, 9).passed);
}

TEST(RestrictedSensitive, SlowRateFails) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const SensitivityParams params{0.5, 0.5 / std::log(2.0)};
  const auto v = check_restricted_sensitive_sampled(*sys, params, dyadic_eps_grid(0.5, 10), 10, 1);
  EXPECT_FALSE(v.passed);
  EXPECT_LT(v.pass_fraction, 1.0);
}

TEST(RestrictedSensitive, RejectsBadGrid) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const Point x = sys->sample_point(1);
  EXPECT_THROW(check_restricted_sensitive(*sys, x, {0.25, 1.0}, {0.5}), std::invalid_argument);
  EXPECT_THROW(check_restricted_sensitive(*sys, x, {0.25, 1.0}, {}), std::invalid_argument);
}

TEST(RestrictedSensitive, MonotoneInRateAndDelta) {
  const auto sys = shift("1/3,2/3", Sidedness::one_sided);
  const std::vector<double> grid = dyadic_eps_grid(0.1, 8);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Point x = sys->sample_point(derive_seed(77, s));
    for (double delta : {0.9, 0.5, 0.3, 0.1}) {
      bool passed_before = false;
      for (double a : {0.5, 1.0, 2.0, 3.0, 5.0, 10.0}) {
        const bool p = check_restricted_sensitive(*sys, x, {delta, a}, grid).passed;
        if (passed_before) {
          EXPECT_TRUE(p) << delta << " " << a;
        }
        passed_before = passed_before || p;
      }
    }
    for (double a : {1.0, 2.0, 3.0, 5.0}) {
      bool passed_before = false;
      for (double delta : {0.9, 0.5, 0.3, 0.1}) {
        const bool p = check_restricted_sensitive(*sys, x, {delta, a}, grid).passed;
        if (passed_before) {
          EXPECT_TRUE(p) << delta << " " << a;
        }
        passed_before = passed_before || p;
      }
    }
  }
}

TEST(RestrictedSensitive, PairwiseImpliesRestrictedWithInflatedRate) {
  const auto sys = shift("1/3,2/3", Sidedness::one_sided);
  const SensitivityParams pairwise{0.5, -1.0 / std::log(2.0 / 3.0) + 1e-6};
  ASSERT_TRUE(check_restricted_pairwise(*sys, pairwise, 2000, 21).passed);
  const double log_inv_c = std::log(3.0);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Point x = sys->sample_point(derive_seed(5, s));
    const double log_ball = sys->ball_measure(x, pairwise.delta).log_value;
    const double inflated = pairwise.rate_a + pairwise.rate_a * log_inv_c / -log_ball;
    EXPECT_TRUE(check_restricted_sensitive(*sys, x, {pairwise.delta, inflated},
                                           dyadic_eps_grid(pairwise.delta, 12)).passed);
  }
}

TEST(RestrictedSensitive, SampledFallbackIsApproximate) {
  const auto inner = shift("1/2,1/2", Sidedness::one_sided);
  SampledBallSystem sys(inner, {4000, 3});
  const Point x = sys.sample_point(2);
  const auto v = check_restricted_sensitive(sys, x, {0.5, 2.0 / std::log(2.0)}, {0.5, 0.25},
                                            RestrictedOptions{1000, {4000, 8}});
  EXPECT_TRUE(v.approximate);
  for (const auto& t : v.trials) EXPECT_TRUE(t.approximate);
}

TEST(Pairwise, UniformPassesAndTimeIsIndex) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const auto v = check_restricted_pairwise(*sys, {0.5, 1.0 / std::log(2.0)}, 2000, 3);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.pass_fraction, 1.0);
  for (const auto& t : v.trials) EXPECT_EQ(*t.sensitive_time, -std::ilogb(t.radius));
}

TEST(Pairwise, TwoSidedHighDeltaFails) {
  const auto sys = shift("1/2,1/2", Sidedness::two_sided);
  const auto v = check_restricted_pairwise(*sys, {0.9, 1.0}, 2000, 3);
  EXPECT_FALSE(v.passed);
  EXPECT_LT(v.pass_fraction, 1.0);
}

TEST(Pairwise, IdenticalPairIsExcluded) {
  const auto sys = shift("1/2,1/2", Sidedness::one_sided);
  const Point x = sys->sample_point(1);
  EXPECT_FALSE(check_pair(*sys, x, x, {0.5, 1.0}).has_value());
  const Point y = word(*sys, {1, 1}), z = SymbolicPoint::with_window(sys->measure_ptr(), Sidedness::one_sided, 0,
                                                                     {1, 1, 1, 1}, SymbolicPoint::Tail::constant(1));
  EXPECT_FALSE(check_pair(*sys, y, z, {0.5, 1.0}, 100).has_value());
}

TEST(TwoSidedWitness, MinimalK1) {
  const auto sys = shift("1/2,1/2", Sidedness::two_sided);
  const auto sigma = sys->as_symbolic(sys->sample_point(1));
  EXPECT_EQ(witness_two_sided_failure(sigma, 0.4, 1.0).k1, 2);
  EXPECT_EQ(witness_two_sided_failure(sigma, 0.9, 1.0).k1, 1);
  EXPECT_EQ(witness_two_sided_failure(sigma, 0.5, 1.0).k1, 2);
}

TEST(TwoSidedWitness, VerifiesAndK2Grows) {
  const auto sys = shift("1/2,1/2", Sidedness::two_sided);
  const auto sigma = sys->as_symbolic(sys->sample_point(11));
  std::int64_t last_k2 = 0;
  for (double a : {1.0, 5.0, 20.0}) {
    const auto w = witness_two_sided_failure(sigma, 0.9, a);
    EXPECT_TRUE(w.verified);
    EXPECT_GT(w.k2, last_k2);
    EXPECT_GT(w.k2, w.bound);
    last_k2 = w.k2;
    EXPECT_EQ(w.rows.size(), static_cast<std::size_t>(w.bound + 1));
    EXPECT_EQ(w.bound, time_bound(a, log_rational(w.ball_measure)));
    EXPECT_EQ(w.ball_measure, cylinder_measure(ball_as_cylinder(sigma, std::ldexp(1.0, -w.k1)), sys->measure()));
    for (const auto& row : w.rows) {
      EXPECT_TRUE(row.below_delta);
      EXPECT_LT(row.distance, Rational(9, 10));
      ASSERT_TRUE(row.reference.has_value());
      EXPECT_LE(row.distance, *row.reference);
    }
    EXPECT_EQ(w.cylinder.lo(), -w.k1);
    EXPECT_NE(w.cylinder.symbols().front(), sigma.at(-w.k1));
  }
}

TEST(TwoSidedWitness, CylinderPointsDoNotSeparate) {
  const auto sys = shift("1/3,2/3", Sidedness::two_sided);
  const auto sigma = sys->as_symbolic(sys->sample_point(4));
  const auto w = witness_two_sided_failure(sigma, 0.75, 3.0);
  ASSERT_TRUE(w.verified);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Point tau = SymbolicPoint::with_window(sys->measure_ptr(), Sidedness::two_sided, w.cylinder.lo(),
                                                 w.cylinder.symbols(), SymbolicPoint::Tail::random(s));
    const Point x = sigma;
    const auto t = first_sensitive_time(*sys, x, tau, 0.75, w.bound);
    EXPECT_FALSE(t.has_value());
    EXPECT_EQ(sys->distance(x, tau).value, std::ldexp(1.0, static_cast<int>(-w.k1)));
  }
}

TEST(RankOneWitness, ChaconLowerBoundRoute) {
  RankOneSystem t(RankOneSpec::chacon());
  for (auto [delta, a] : {std::pair{0.01, 1.0}, std::pair{0.05, 3.0}}) {
    const auto w = witness_rank_one_failure(t, delta, a);
    EXPECT_TRUE(w.verified);
    EXPECT_EQ(w.proportion_bound, Rational(1, 3));
    EXPECT_LT(t.max_width(w.stage), rational_from_double(delta));
    EXPECT_LT(2 * w.bound, t.height(w.stage));
    EXPECT_EQ(w.rows.size(), static_cast<std::size_t>(w.bound + 1));
    EXPECT_EQ(w.rows.front().distance, 2 * w.w);
    EXPECT_EQ(w.ball_measure, 2 * w.w);
    EXPECT_EQ(w.bound, time_bound(a, log_rational(w.ball_measure)));
    EXPECT_LT(w.max_diameter, rational_from_double(delta));
    EXPECT_LT(w.inequality_lhs, w.inequality_rhs);

    const auto v = check_restricted_sensitive(t, Point{w.x}, {delta, a}, {w.w.get_d()});
    EXPECT_FALSE(v.passed);
  }
}

TEST(RankOneWitness, BinaryMeasurePreservingRoute) {
  RankOneSpec spec;
  spec.initial_width = Rational(1, 2);
  spec.cycle = {Stage::parse("2 | 0,1")};
  RankOneSystem t(spec);
  const auto w = witness_rank_one_failure(t, 0.01, 1.0, RankOneRoute::measure_preserving);
  EXPECT_TRUE(w.verified);
  EXPECT_EQ(w.route, RankOneRoute::measure_preserving);
  EXPECT_EQ(parse_rank_one_route(to_string(w.route)), w.route);
}

TEST(RankOneWitness, ReportsShallowDepth) {
  RankOneSystem t(RankOneSpec::chacon(), {3, 1, false});
  EXPECT_THROW(witness_rank_one_failure(t, 0.01, 1.0), std::runtime_error);
}

TEST(Rate, DefaultGrid) {
  EXPECT_EQ(default_c_grid(1'000'000), (std::vector<std::int64_t>{0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024,
                                                                   2048, 4096, 8192}));
  EXPECT_EQ(default_c_grid(10), (std::vector<std::int64_t>{0}));
}

TEST(Rate, ConstantSequenceUnderUniformMeasure) {
  ShiftSystem sys(ProbabilityVector::uniform(2), Sidedness::one_sided);
  const auto ones = SymbolicPoint::constant(sys.measure_ptr(), Sidedness::one_sided, 1);
  const auto exact = estimate_min_asymptotic_rate(sys, ones, 10000, {0});
  EXPECT_NEAR(exact.reciprocal, std::log(2.0), 1e-12);
  EXPECT_NEAR(exact.estimate * exact.reciprocal, 1.0, 1e-12);
  const auto grid = estimate_min_asymptotic_rate(sys, ones, 64000);
  EXPECT_GE(grid.reciprocal, std::log(2.0) - 1e-12);
  EXPECT_LE(grid.reciprocal, std::log(2.0) * 64.0 / 63.0 + 1e-12);
}

TEST(Rate, TypicalPointMatchesEntropy) {
  ShiftSystem sys(ProbabilityVector::parse("1/3,2/3"), Sidedness::one_sided);
  const double h = std::log(3.0) - 2.0 / 3.0 * std::log(2.0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto sigma = sys.as_symbolic(sys.sample_point(s));
    const auto r = estimate_min_asymptotic_rate(sys, sigma, 200000);
    EXPECT_NEAR(r.reciprocal / h, 1.0, 0.05);
    EXPECT_EQ(r.inf_by_c.size(), r.c_grid.size());
  }
}
