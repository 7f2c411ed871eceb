#include "rsens/config.hpp"
#include "rsens/random.hpp"
#include "rsens/suite.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rsens;

namespace {

const char* kMinimal = R"(
[system]
type = shift
p = 1/2,1/2

[experiment]
kind = check-rps
seed = 7
delta = 1/2
a = 1/log(2)
)";

std::string with_experiment(const std::string& body) {
  return "[system]\ntype = shift\np = 1/2,1/2\n\n[experiment]\n" + body;
}

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL() << "accepted:\n" << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(RealExpression, Evaluates) {
  EXPECT_DOUBLE_EQ(evaluate_real("1/2"), 0.5);
  EXPECT_DOUBLE_EQ(evaluate_real("1/log(2)"), 1.0 / std::log(2.0));
  EXPECT_DOUBLE_EQ(evaluate_real("-1/log(2/3) + 0.000001"), -1.0 / std::log(2.0 / 3.0) + 1e-6);
  EXPECT_DOUBLE_EQ(evaluate_real("2*(3 - 1)"), 4.0);
  EXPECT_DOUBLE_EQ(evaluate_real("1e-3"), 1e-3);
  for (const char* bad : {"", "1/", "log(", "2 3", "1/0", "foo", "log(-1)"})
    EXPECT_THROW(evaluate_real(bad), ConfigError) << bad;
}

TEST(Config, MinimalWithDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.kind, ExperimentKind::check_rps);
  EXPECT_EQ(cfg.system.kind, SystemDecl::Kind::shift);
  EXPECT_EQ(cfg.system.sides, Sidedness::one_sided);
  EXPECT_EQ(cfg.system.probabilities, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(cfg.params.seed, 7u);
  EXPECT_DOUBLE_EQ(cfg.params.delta->value, 0.5);
  EXPECT_EQ(cfg.params.rate_a->text, "1/log(2)");
  EXPECT_EQ(cfg.params.pairs, 1000u);
  EXPECT_EQ(cfg.params.horizon, 1'000'000);
  EXPECT_DOUBLE_EQ(cfg.params.tolerance, 0.05);
  EXPECT_NE(cfg.system.build(), nullptr);
}

TEST(Config, RejectsNonNormalized) {
  expect_error("[system]\ntype = shift\np = 1/3,1/3\n\n[experiment]\nkind = rate\nseed = 1\n", "p");
}

TEST(Config, Diagnostics) {
  expect_error(with_experiment("kind = rate\n"), "seed");
  expect_error(with_experiment("seed = 1\n"), "kind");
  expect_error(with_experiment("kind = rate\nseed = 1\ncolour = red\n"), "colour");
  expect_error(with_experiment("kind = check-rps\nseed = 1\na = 1\n"), "delta");
  expect_error(with_experiment("kind = check-rps\nseed = 1\ndelta = -1\na = 1\n"), "delta");
  expect_error(with_experiment("kind = rate\nseed = x\n"), "seed");
  expect_error(with_experiment("kind = rate\nseed = 1\nseed = 2\n"), "duplicate");
  expect_error(with_experiment("kind = nothing\nseed = 1\n"), "nothing");
  expect_error(with_experiment("kind = entropy\nseed = 1\nmethod = brin-katok\n"), "delta");
  expect_error("[system]\ntype = shift\np = 1/2,1/0\n\n[experiment]\nkind = rate\nseed = 1\n", "p");
  expect_error("[system]\ntype = shift\np = 1/2,1/2\nsides = three\n\n[experiment]\nkind = rate\nseed = 1\n",
               "sides");
  expect_error("[system]\ntype = blob\n\n[experiment]\nkind = rate\nseed = 1\n", "blob");
  expect_error(std::string(kMinimal) + "\n[extra]\nx = 1\n", "extra");
  expect_error("[system\ntype = shift\n", "section");
  expect_error("[experiment]\nkind = rate\nseed = 1\n", "system");
}

TEST(Config, ChaconParses) {
  const auto cfg = parse_config(R"(
[system]
type = rank-one
w0 = 2/3
cycle = 3 | 0,1,0   # Chacon

[experiment]
kind = witness-rankone-failure
seed = 1
delta = 0.01
a = 1
)");
  EXPECT_EQ(cfg.system.kind, SystemDecl::Kind::rank_one);
  EXPECT_EQ(cfg.system.spec, RankOneSpec::chacon());
  ASSERT_EQ(cfg.system.spec.cycle.size(), 1u);
  EXPECT_EQ(cfg.system.spec.cycle[0].cuts, 3u);
  EXPECT_EQ(cfg.system.spec.cycle[0].spacers, (std::vector<std::uint64_t>{0, 1, 0}));
  EXPECT_TRUE(cfg.system.spec.cycle[0].is_uniform());
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, ProductNesting) {
  const auto cfg = parse_config(R"(
[system]
type = product

[system.left]
type = shift
p = 1/2,1/2

[system.right]
type = product

[system.right.left]
type = rotation
alpha = 1/3

[system.right.right]
type = shift
p = 1/3,2/3
sides = two

[experiment]
kind = check-rs
seed = 4
delta = 1/2
a = 2
eps = 1/4, 1/8
)");
  ASSERT_EQ(cfg.system.kind, SystemDecl::Kind::product);
  ASSERT_EQ(cfg.system.components.size(), 2u);
  const auto& right = cfg.system.components[1];
  EXPECT_EQ(right.kind, SystemDecl::Kind::product);
  EXPECT_EQ(right.components[0].kind, SystemDecl::Kind::rotation);
  EXPECT_DOUBLE_EQ(right.components[0].alpha.value, 1.0 / 3);
  EXPECT_EQ(right.components[1].sides, Sidedness::two_sided);
  EXPECT_EQ(cfg.params.eps_values.size(), 2u);
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
  EXPECT_NE(dynamic_cast<const ProductSystem*>(cfg.system.build().get()), nullptr);

  expect_error("[system]\ntype = product\n[system.left]\ntype = shift\np = 1/2,1/2\n\n[experiment]\nkind = rate\n"
               "seed = 1\n",
               "system.right");
}

TEST(Config, RoundTripOnReferenceConfigs) {
  for (const auto& [name, text] : reference_configs(3)) {
    const auto cfg = parse_config(text);
    const auto again = parse_config(serialize_config(cfg));
    EXPECT_EQ(again, cfg) << name;
    EXPECT_EQ(serialize_config(again), serialize_config(cfg)) << name;
  }
}

TEST(Config, RoundTripOnRandomConfigs) {
  const char* probs[] = {"1/2,1/2", "1/3,2/3", "1/4,1/4,1/2", "1/7,2/7,4/7"};
  const char* kinds[] = {"check-rs", "check-rps", "rate", "entropy", "bound-check"};
  const char* reals[] = {"1/2", "0.25", "1/log(2)", "2/log(3) + 0.1", "3"};
  SplitMix rng(2024);
  for (int t = 0; t < 200; ++t) {
    std::string text = "[system]\ntype = shift\np = " + std::string(probs[rng.below(4)]) + "\nsides = " +
                       (rng.below(2) ? "one" : "two") + "\nhorizon = " + std::to_string(1 + rng.below(100000)) +
                       "\n\n[experiment]\nkind = " + kinds[rng.below(5)] + "\nseed = " + std::to_string(rng.next()) +
                       "\ndelta = " + reals[rng.below(2)] + "\na = " + reals[rng.below(5)] +
                       "\npairs = " + std::to_string(1 + rng.below(5000)) + "\nn = " + std::to_string(rng.below(50)) +
                       "\ntolerance = 0.0" + std::to_string(1 + rng.below(9)) + "\n";
    if (rng.below(2)) text += "eps = 1/8, 1/16, 0.01\n";
    const auto cfg = parse_config(text);
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << text;
  }
}
