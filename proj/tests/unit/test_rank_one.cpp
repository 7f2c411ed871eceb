#include "rsens/random.hpp"
#include "rsens/rank_one.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace rsens;

namespace {

RankOneSpec cyclic(const char* stage, Rational w0) {
  RankOneSpec s;
  s.initial_width = w0;
  s.cycle = {Stage::parse(stage)};
  return s;
}

Rational random_in(const RationalInterval& iv, SplitMix& rng) {
  Rational u(BigInt(static_cast<unsigned long>(rng.below(1u << 30))), BigInt(1u << 30));
  u.canonicalize();
  return iv.left + iv.length() * u;
}

Rational measure_of(const std::vector<RationalInterval>& ivs) {
  Rational sum = 0;
  for (const auto& iv : ivs) sum += iv.length();
  return sum;
}

bool pairwise_disjoint(std::vector<RationalInterval> ivs) {
  std::sort(ivs.begin(), ivs.end(), [](const auto& a, const auto& b) { return a.left < b.left; });
  for (std::size_t k = 1; k < ivs.size(); ++k)
    if (ivs[k].left < ivs[k - 1].right) return false;
  return true;
}

}  // namespace

TEST(Stage, ParseAndRoundTrip) {
  const Stage chacon = Stage::parse("3 | 0,1,0");
  EXPECT_EQ(chacon.cuts, 3u);
  EXPECT_EQ(chacon.spacers, (std::vector<std::uint64_t>{0, 1, 0}));
  EXPECT_TRUE(chacon.is_uniform());
  EXPECT_EQ(chacon.spacer_total(), 1u);
  EXPECT_EQ(Stage::parse(chacon.to_string()), chacon);

  const Stage skew = Stage::parse("2 | 0,1 | 1/3,2/3");
  EXPECT_FALSE(skew.is_uniform());
  EXPECT_EQ(skew.proportion(1), Rational(2, 3));
  EXPECT_EQ(Stage::parse(skew.to_string()), skew);

  EXPECT_TRUE(Stage::parse("2 | 1,1 | 1/2,1/2").proportions.empty());
  EXPECT_THROW(Stage::parse("3"), std::invalid_argument);
  EXPECT_ANY_THROW(Stage::parse("3 | a,b,c"));
}

TEST(Spec, ValidationFindsProblems) {
  EXPECT_FALSE(validate_spec(cyclic("3 | 0,1", Rational(2, 3)), 3).valid);
  EXPECT_FALSE(validate_spec(cyclic("2 | 0,1 | 1/3,1/3", Rational(1, 2)), 3).valid);
  EXPECT_FALSE(validate_spec(cyclic("1 | 0", Rational(1, 2)), 3).valid);
  const auto ok = validate_spec(RankOneSpec::chacon(), 4);
  EXPECT_TRUE(ok.valid);
  EXPECT_TRUE(ok.measure_preserving);
  EXPECT_EQ(ok.heights.size(), 5u);
  EXPECT_EQ(ok.heights.back(), 121);
  EXPECT_EQ(RankOneSpec::chacon().proportion_lower_bound(), Rational(1, 3));
  EXPECT_THROW(RankOneSystem(cyclic("3 | 0,1", Rational(2, 3))), std::invalid_argument);
}

TEST(Chacon, HeightsWidthsTotal) {
  RankOneSystem t(RankOneSpec::chacon());
  const int expected[] = {1, 4, 13, 40, 121};
  Rational width(2, 3);
  for (std::size_t n = 0; n < 5; ++n) {
    EXPECT_EQ(t.height(n), expected[n]);
    EXPECT_EQ(t.min_width(n), width);
    EXPECT_EQ(t.max_width(n), width);
    width /= 3;
  }
  for (std::size_t n = 0; n + 1 < 40; ++n) EXPECT_EQ(t.height(n + 1), 3 * t.height(n) + 1);
  EXPECT_EQ(t.total_measure(), 1);
  EXPECT_EQ(t.depth(), 64u);
  EXPECT_DOUBLE_EQ(t.diameter(), 1.0);
}

TEST(Chacon, ExplicitColumnsMatchImplicitLevels) {
  const auto spec = RankOneSpec::chacon();
  RankOneSystem t(spec);
  const auto cols = build_columns(spec, 5);
  ASSERT_EQ(cols.size(), 6u);
  for (std::size_t n = 0; n < cols.size(); ++n) {
    ASSERT_EQ(BigInt(static_cast<unsigned long>(cols[n].height())), t.height(n));
    for (std::size_t i = 0; i < cols[n].height(); ++i)
      EXPECT_EQ(cols[n].levels[i], t.level(n, BigInt(static_cast<unsigned long>(i)))) << n << "," << i;
    EXPECT_TRUE(pairwise_disjoint(cols[n].levels));
    for (const auto& iv : cols[n].levels) EXPECT_EQ(iv.length(), t.max_width(n));
  }
}

TEST(Chacon, ColumnMapIsTranslationBetweenLevels) {
  RankOneSystem t(RankOneSpec::chacon());
  SplitMix rng(4);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(6);
    const BigInt i = static_cast<unsigned long>(rng.below(t.height(n).get_ui() - 1));
    const auto from = t.level(n, i);
    const auto to = t.level(n, i + 1);
    const Rational x = random_in(from, rng);
    const auto tx = t.apply(x, 64);
    ASSERT_TRUE(tx.has_value());
    EXPECT_EQ(*tx, x - from.left + to.left);
    EXPECT_EQ(*t.apply_inverse(*tx, 64), x);
    EXPECT_EQ(*t.radon_nikodym(x, 64), 1);
  }
}

TEST(Chacon, InverseRoundTripOnRandomPoints) {
  RankOneSystem t(RankOneSpec::chacon());
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Rational x = std::get<Rational>(t.sample_point(s));
    const auto tx = t.apply(x, 64);
    ASSERT_TRUE(tx.has_value());
    EXPECT_EQ(*t.apply_inverse(*tx, 64), x);
    const auto back = t.apply_inverse(x, 64);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*t.apply(*back, 64), x);
  }
}

TEST(Chacon, LocateAndRefine) {
  RankOneSystem t(RankOneSpec::chacon());
  const auto loc = t.locate(Rational(1, 5));
  ASSERT_TRUE(loc.has_value());
  EXPECT_EQ(loc->stage, 0u);
  EXPECT_TRUE(loc->level.contains(Rational(1, 5)));
  const auto deeper = t.refine(*loc, Rational(1, 5));
  EXPECT_EQ(deeper.stage, 1u);
  EXPECT_TRUE(deeper.level.contains(Rational(1, 5)));
  EXPECT_EQ(deeper.level, t.level(1, deeper.index));
  const auto spacer = t.locate(Rational(2, 3) + Rational(1, 100));
  ASSERT_TRUE(spacer.has_value());
  EXPECT_EQ(spacer->stage, 1u);
  EXPECT_THROW(t.locate(Rational(1)), std::domain_error);
  EXPECT_THROW(t.locate(Rational(-1, 2)), std::domain_error);
}

TEST(Chacon, PreimageOfLevelUnionsPreservesMeasure) {
  RankOneSystem t(RankOneSpec::chacon());
  SplitMix rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(4);
    const auto h = t.height(n).get_ui();
    std::set<unsigned long> chosen;
    const auto count = 1 + rng.below(h);
    while (chosen.size() < count) chosen.insert(rng.below(h));
    std::vector<BigInt> levels(chosen.begin(), chosen.end());
    Rational tail = 0;
    const auto pre = t.preimage_of_levels(n, levels, 20, &tail);
    EXPECT_TRUE(pairwise_disjoint(pre));
    EXPECT_EQ(measure_of(pre) + tail, t.max_width(n) * static_cast<unsigned long>(levels.size()));
    for (const auto& iv : pre) {
      const Rational mid = (iv.left + iv.right) / 2;
      const auto image = t.apply(mid, 64);
      ASSERT_TRUE(image.has_value());
      bool inside = false;
      for (const auto& l : levels) inside = inside || t.level(n, l).contains(*image);
      EXPECT_TRUE(inside);
    }
  }
}

TEST(Chacon, TransformIntervalInsideColumn) {
  RankOneSystem t(RankOneSpec::chacon());
  const auto base = t.level(4, 0);
  const RationalInterval j{base.left, base.left + base.length() / 7};
  const auto image = t.transform_interval(j, 100, 64);
  EXPECT_EQ(image.pieces.size(), 1u);
  EXPECT_EQ(image.pieces[0].left - j.left, t.level(4, 100).left - base.left);
  EXPECT_EQ(image.diameter, j.length());
}

TEST(Chacon, TopLevelNeedsDeeperColumns) {
  RankOneSystem t(RankOneSpec::chacon(), {3, 1, false});
  EXPECT_EQ(t.depth(), 3u);
  const auto top = t.level(3, t.height(3) - 1);
  EXPECT_THROW(t.transform_interval(top, 1, 3), UndefinedAtDepth);
  EXPECT_FALSE(t.apply(top.left, 3).has_value());
}

TEST(Chacon, LebesgueBall) {
  RankOneSystem t(RankOneSpec::chacon());
  EXPECT_EQ(t.lebesgue_ball_measure(Rational(1, 2), Rational(1, 10)), Rational(1, 5));
  EXPECT_EQ(t.lebesgue_ball_measure(Rational(0), Rational(1, 10)), Rational(1, 10));
  EXPECT_EQ(t.lebesgue_ball_measure(Rational(1, 2), Rational(3)), 1);
  EXPECT_EQ(*t.ball_measure(Point{Rational(1, 2)}, 0.1).exact, t.lebesgue_ball_measure(Rational(1, 2), rational_from_double(0.1)));
}

TEST(RankOne, BinarySpecTotalAndHeights) {
  RankOneSystem t(cyclic("2 | 0,1", Rational(1, 2)));
  EXPECT_EQ(t.total_measure(), 1);
  for (std::size_t n = 0; n < 10; ++n) EXPECT_EQ(t.height(n + 1), 2 * t.height(n) + 1);
  EXPECT_TRUE(t.spec().measure_preserving());
}

TEST(RankOne, NonuniformProportionsDistortMeasure) {
  RankOneOptions opts;
  opts.depth_cap = 30;
  opts.space_cap = 4;
  RankOneSystem t(cyclic("2 | 0,1 | 1/3,2/3", Rational(1, 2)), opts);
  EXPECT_FALSE(t.spec().measure_preserving());
  EXPECT_EQ(t.spec().proportion_lower_bound(), Rational(1, 3));
  bool distorted = false;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Rational x = std::get<Rational>(t.sample_point(s));
    const auto tx = t.apply(x, 30);
    if (!tx) continue;
    EXPECT_EQ(*t.apply_inverse(*tx, 30), x);
    distorted = distorted || *t.radon_nikodym(x, 30) != 1;
  }
  EXPECT_TRUE(distorted);
}

TEST(RankOne, ColumnBuildErrors) {
  const auto greedy = cyclic("2 | 1,1", Rational(1, 2));
  EXPECT_THROW(build_columns(greedy, 4), std::domain_error);
  EXPECT_NO_THROW(build_columns(greedy, 4, 1, true));
  EXPECT_THROW(build_columns(RankOneSpec::chacon(), 12, 1, false, 1000), std::length_error);
  EXPECT_FALSE(validate_spec(greedy, 4).within_cap);
}

TEST(RankOne, WidthAndHeightBounds) {
  RankOneOptions opts;
  opts.space_cap = 4;
  for (const char* stage : {"3 | 0,1,0", "2 | 0,1", "2 | 0,1 | 1/3,2/3", "3 | 1,0,2 | 1/4,1/4,1/2"}) {
    RankOneSystem t(cyclic(stage, Rational(1, 2)), opts);
    const Rational c = t.spec().proportion_lower_bound();
    Rational cn = 1;
    for (std::size_t n = 0; n <= 20; ++n) {
      EXPECT_GE(t.min_width(n), cn * t.spec().initial_width) << stage << " " << n;
      EXPECT_GE(t.height(n), BigInt(1) << n) << stage << " " << n;
      if (t.spec().measure_preserving()) {
        EXPECT_GE(t.min_width(n) * Rational(t.height(n)), t.spec().initial_width);
      }
      cn *= c;
    }
  }
}

TEST(RankOne, DeeperColumnMapsAgree) {
  // T_{n+1} = T_n off the top level of C_n: the image computed from C_n is
  // the same as the image computed in any deeper column.
  RankOneSystem t(RankOneSpec::chacon());
  SplitMix rng(31);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(5);
    const BigInt i = static_cast<unsigned long>(rng.below(t.height(n).get_ui() - 1));
    const Rational x = random_in(t.level(n, i), rng);
    auto loc = *t.locate(x);
    while (loc.stage < n + 3) {
      loc = t.refine(loc, x);
      const BigInt h = t.height(loc.stage);
      if (loc.index + 1 < h) {
        EXPECT_EQ(*t.apply(x, 64), x - loc.level.left + t.level(loc.stage, loc.index + 1).left);
      }
    }
  }
}
