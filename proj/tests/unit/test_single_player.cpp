#include <gtest/gtest.h>

#include <cmath>

#include "ocm/error.hpp"
#include "ocm/single_player.hpp"
#include "oracles/dp.hpp"

using namespace ocm;

namespace {

GridSpec base_grid(std::size_t steps = 100) {
  GridSpec g;
  g.time = {0.0, 1.0 / 12, steps};
  g.inventory = {0.0, 0.1, 71};
  g.price = {0.0, 0.05, 61};
  return g;
}

GridSpec tiny_grid(std::size_t steps, double dx, std::size_t nodes) {
  GridSpec g;
  g.time = {0.0, 1.0 / 12, steps};
  g.inventory = {0.0, dx, nodes};
  g.price = {0.0, 0.75, 5};
  return g;
}

void expect_matches_oracle(const MarketParams& m, const PlayerSpec& p, const GridSpec& g) {
  const SinglePlayerSolution sol = solve_single(m, p, g);
  const oracle::SingleResult ref = oracle::single_dp(m, p, g);
  for (std::size_t k = 0; k <= g.time.steps; ++k) {
    for (std::size_t i = 0; i < g.inventory.count; ++i) {
      for (std::size_t j = 0; j < g.price.count; ++j) {
        ASSERT_NEAR(sol.value[k](i, j), ref.value[k][i][j], 1e-6) << k << "," << i << "," << j;
        if (k < g.time.steps) {
          ASSERT_EQ(sol.decision[k](i, j), ref.generate[k][i][j]);
        }
      }
    }
  }
}

}  // namespace

TEST(GenerationValue, FlatContinuationCostsTheFee) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid();
  const Slice u(g.inventory.count, g.price.count, 0.0);
  EXPECT_DOUBLE_EQ(generation_value(u, 10, 30, p, m, g), -0.25);
  EXPECT_TRUE(std::isinf(generation_value(u, 70, 30, p, m, g)));
}

TEST(SolveSingle, MarginalGenerationIsNearlyIndifferentBelowTheRequirement) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid();
  const SinglePlayerSolution sol = solve_single(m, p, g);
  const Slice& u = sol.continuation[g.time.steps - 1];
  const std::size_t i = 49;  // x = R - xi
  for (std::size_t j : {40u, 50u}) {
    EXPECT_NEAR(generation_value(u, i, j, p, m, g), u(i, j), 0.02) << j;
  }
}

TEST(SolveSingle, NoGenerationAtOrAboveTheRequirement) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid();
  const SinglePlayerSolution sol = solve_single(m, p, g);
  for (std::size_t k = 0; k <= g.time.steps; ++k) {
    for (std::size_t i = 50; i < g.inventory.count; ++i) {
      for (std::size_t j = 0; j < g.price.count; ++j) {
        ASSERT_EQ(sol.decision[k](i, j), 0.0) << k << "," << i << "," << j;
        if (k < g.time.steps && i + 1 < g.inventory.count) {
          ASSERT_LT(generation_value(sol.continuation[k], i, j, p, m, g), sol.continuation[k](i, j));
        }
      }
    }
  }
}

TEST(SolveSingle, ValueIsTheMaxOfBothBranches) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid(40);
  const SinglePlayerSolution sol = solve_single(m, p, g);
  for (std::size_t k = 0; k < g.time.steps; ++k) {
    for (std::size_t i = 0; i < g.inventory.count; ++i) {
      for (std::size_t j = 0; j < g.price.count; ++j) {
        const double stay = sol.continuation[k](i, j);
        const double gen = generation_value(sol.continuation[k], i, j, p, m, g);
        ASSERT_EQ(sol.value[k](i, j), std::max(stay, gen));
        ASSERT_EQ(sol.decision[k](i, j), gen >= stay ? 1.0 : 0.0);
      }
    }
  }
  for (std::size_t i = 0; i < g.inventory.count; ++i) {
    EXPECT_EQ(sol.value[g.time.steps](i, 3), penalty_value(g.inventory.node(i), 5.0, 2.5));
  }
}

TEST(SolveSingle, SellsExcessLate) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid();
  const SinglePlayerSolution sol = solve_single(m, p, g);
  EXPECT_NEAR(sol.trade_rate[g.time.steps - 1](60, 50), -2.5 / 0.03, 1e-9);
  EXPECT_NEAR(optimal_trade_rate(sol.value[g.time.steps], 60, 50, m, g), -83.3333333333, 1e-6);
  EXPECT_EQ(sol.trade_rate[g.time.steps](60, 50), 0.0);
}

TEST(SolveSingle, FrozenProblemKeepsThePenalty) {
  MarketParams m;
  m.sigma = 0.0;
  m.kappa = 1e9;
  PlayerSpec p;
  p.gen_cost = 1e9;
  const GridSpec g = base_grid();
  const SinglePlayerSolution sol = solve_single(m, p, g);
  for (std::size_t k = 0; k <= g.time.steps; ++k) {
    for (std::size_t i = 0; i < g.inventory.count; ++i) {
      const double expected = penalty_value(g.inventory.node(i), 5.0, 2.5);
      for (std::size_t j = 0; j < g.price.count; ++j) ASSERT_NEAR(sol.value[k](i, j), expected, 1e-6);
    }
  }
}

TEST(SolveSingle, ThreadCountDoesNotChangeResults) {
  const MarketParams m;
  const PlayerSpec p;
  const GridSpec g = base_grid(30);
  const SinglePlayerSolution a = solve_single(m, p, g, {1});
  const SinglePlayerSolution b = solve_single(m, p, g, {3});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.decision, b.decision);
  EXPECT_EQ(a.trade_rate, b.trade_rate);
}

TEST(SolveSingle, DivergenceIsReported) {
  MarketParams m;
  m.kappa = 1e-6;
  const PlayerSpec p;
  GridSpec g = base_grid(50);
  g.gradient = GradientScheme::Central;
  EXPECT_THROW(solve_single(m, p, g), NumericalError);
}

TEST(SolveSingle, RejectsMultiplePeriods) {
  MarketParams m;
  m.compliance_dates = {1.0 / 24, 1.0 / 12};
  PlayerSpec p;
  p.requirements = {5.0, 5.0};
  EXPECT_THROW(solve_single(m, p, base_grid()), ConfigError);
}

TEST(TinyOracle, TwoStepsUpwind) {
  MarketParams m;
  PlayerSpec p;
  p.gen_lot = 1.0;
  p.gen_cost = 2.5;
  p.requirements = {3.0};
  expect_matches_oracle(m, p, tiny_grid(2, 1.0, 6));
}

TEST(TinyOracle, ThreeStepsCentralWiderLot) {
  MarketParams m;
  m.kappa = 0.5;
  PlayerSpec p;
  p.gen_lot = 0.4;
  p.gen_cost = 0.6;
  p.requirements = {1.0};
  GridSpec g = tiny_grid(3, 0.2, 6);
  g.gradient = GradientScheme::Central;
  expect_matches_oracle(m, p, g);
  g.gradient = GradientScheme::Upwind;
  expect_matches_oracle(m, p, g);
}
