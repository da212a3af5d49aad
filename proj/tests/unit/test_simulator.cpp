#include <gtest/gtest.h>

#include "ocm/error.hpp"
#include "ocm/simulator.hpp"

using namespace ocm;

namespace {

GridSpec default_grid() {
  GridSpec g;
  g.time = {0.0, 1.0 / 12, 100};
  g.inventory = {0.0, 0.05, 151};
  g.price = {0.0, 0.05, 61};
  return g;
}

SimContext base_context() { return {MarketParams{}, {PlayerSpec{}}, default_grid()}; }

SimOptions opts(std::size_t paths) {
  SimOptions o;
  o.paths = paths;
  return o;
}

}  // namespace

TEST(Naive, OnlyGenerateIsExactlyTheFee) {
  const auto r = run_simulation({Strategy::naive(StrategyKind::OnlyGenerate)}, base_context(), opts(500));
  for (const PathRecord& p : r[0].paths) {
    ASSERT_EQ(p.ledgers[0].pnl(), -12.5);
    ASSERT_EQ(p.ledgers[0].generation_events, 50u);
  }
  EXPECT_EQ(r[0].stats[0].mean_pnl, -12.5);
  EXPECT_EQ(r[0].stats[0].te, -12.5);
}

TEST(Naive, DeterministicLedgers) {
  SimContext c = base_context();
  c.market.sigma = 0.0;
  SimOptions o = opts(1);
  const auto r = run_simulation({Strategy::naive(StrategyKind::ConstantTrade),
                                 Strategy::naive(StrategyKind::HalfTradeHalfGenerate)},
                                c, o);
  // Constant trading at 60 per year for a month at a flat 2.5.
  const PlayerLedger& ct = r[0].paths[0].ledgers[0];
  EXPECT_NEAR(ct.trading_cost, 12.5, 1e-9);
  EXPECT_NEAR(ct.friction_cost, 0.5 * 0.03 * 3600.0 / 12.0, 1e-9);
  EXPECT_NEAR(ct.penalty_total(), 0.0, 1e-9);
  EXPECT_NEAR(ct.pnl(), -12.5, 1e-9);
  // Half of the requirement bought at 2.5, the rest generated at 0.25 per 0.1.
  const PlayerLedger& half = r[1].paths[0].ledgers[0];
  EXPECT_NEAR(half.trading_cost, 6.25, 1e-9);
  EXPECT_EQ(half.generation_events, 25u);
  EXPECT_NEAR(half.pnl(), -12.5, 1e-9);

  o.pnl_friction = true;
  const auto f = run_simulation({Strategy::naive(StrategyKind::ConstantTrade)}, c, o);
  EXPECT_NEAR(f[0].paths[0].ledgers[0].pnl(), -12.5 - 4.5, 1e-9);
}

TEST(Naive, LedgerIdentity) {
  SimContext c = base_context();
  c.players[0].requirements = {5.0};
  const auto r = run_simulation({Strategy::naive(StrategyKind::HalfTradeHalfGenerate)}, c, opts(50));
  for (const PathRecord& p : r[0].paths) {
    const PlayerLedger& l = p.ledgers[0];
    const double x = l.initial_inventory + l.traded + 0.1 * l.generation_events - l.submitted;
    EXPECT_EQ(l.inventory(0.1), x);
    EXPECT_NEAR(l.submitted, 5.0, 1e-9);
  }
}

TEST(Simulation, CommonRandomNumbers) {
  SimOptions o = opts(20);
  o.naive_impact = false;
  const auto r = run_simulation({Strategy::naive(StrategyKind::ConstantTrade),
                                 Strategy::naive(StrategyKind::OnlyGenerate)},
                                base_context(), o);
  for (std::size_t p = 0; p < 20; ++p) EXPECT_EQ(r[0].paths[p].final_price, r[1].paths[p].final_price);
}

TEST(Simulation, ThreadsAndRepeatsAreBitIdentical) {
  SimOptions a = opts(300);
  SimOptions b = a;
  b.threads = 3;
  const auto x = run_simulation({Strategy::naive(StrategyKind::HalfTradeHalfGenerate)}, base_context(), a);
  const auto y = run_simulation({Strategy::naive(StrategyKind::HalfTradeHalfGenerate)}, base_context(), b);
  EXPECT_EQ(x[0].stats[0].mean_pnl, y[0].stats[0].mean_pnl);
  EXPECT_EQ(x[0].stats[0].te, y[0].stats[0].te);
  EXPECT_EQ(x[0].stats[0].se, y[0].stats[0].se);
}

TEST(Simulation, ZeroPathsRejected) {
  EXPECT_THROW(run_simulation({Strategy::naive(StrategyKind::ConstantTrade)}, base_context(), opts(0)),
               ConfigError);
}

TEST(Simulation, OptimalNeverLosesMoreThanTheFullPenalty) {
  const SimContext c = base_context();
  const SinglePlayerSolution sol = solve_single(c.market, c.players[0], c.grid);
  const auto r = run_simulation({Strategy::optimal(sol)}, c, opts(1000));
  for (const PathRecord& p : r[0].paths) ASSERT_GT(p.ledgers[0].pnl(), -2.5 * 5.0);
  EXPECT_GT(r[0].stats[0].mean_generated, 4.0);
}

TEST(PolicyStep, NodeLookupAndInterpolation) {
  const GridSpec g = default_grid();
  const MarketParams m;
  const PlayerSpec p;
  Slice rate(g.inventory.count, g.price.count, 0.0), decision(g.inventory.count, g.price.count, 0.0);
  rate(20, 10) = 4.0;
  rate(20, 11) = 6.0;
  PolicySlices slices;
  slices.grid = &g;
  slices.trade_rate[0] = &rate;
  slices.generate[0] = &decision;
  SimState s;
  s.x[0] = g.inventory.node(20);
  s.s = g.price.node(10);
  StepAction a = execute_policy_step(slices, s, {0.5, 0.5}, m, {&p, 1});
  EXPECT_EQ(a.rate[0], 4.0);
  EXPECT_FALSE(a.generate[0]);
  s.s = 0.5 * (g.price.node(10) + g.price.node(11));
  a = execute_policy_step(slices, s, {0.5, 0.5}, m, {&p, 1});
  EXPECT_NEAR(a.rate[0], 5.0, 1e-12);
}

TEST(PolicyStep, CertainGenerationInTwoPlayerMode) {
  GridSpec g = default_grid();
  g.inventory = {0.0, 0.1, 11};
  const MarketParams m;
  const std::array<PlayerSpec, 2> pl{};
  const std::size_t I = 11;
  Slice zero(I * I, g.price.count, 0.0), one(I * I, g.price.count, 1.0);
  PolicySlices slices;
  slices.grid = &g;
  slices.players = 2;
  slices.trade_rate = {&zero, &zero};
  slices.generate = {&one, &zero};
  SimState s;
  s.x = {0.3, 0.4};
  s.s = 2.5;
  const StepAction a = execute_policy_step(slices, s, {0.999999, 0.0}, m, pl);
  EXPECT_TRUE(a.generate[0]);
  EXPECT_FALSE(a.generate[1]);
  EXPECT_NEAR(a.s_after, 2.495, 1e-12);
}

TEST(Strategy, NamesRoundTrip) {
  for (StrategyKind k : {StrategyKind::OptimalSingle, StrategyKind::NashTwo, StrategyKind::ConstantTrade,
                         StrategyKind::HalfTradeHalfGenerate, StrategyKind::OnlyGenerate}) {
    EXPECT_EQ(strategy_from_string(to_string(k)), k);
  }
  EXPECT_THROW(strategy_from_string("hodl"), ConfigError);
}
