#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocm/grid.hpp"
#include "ocm/market.hpp"
#include "ocm/multi_period.hpp"
#include "ocm/single_player.hpp"
#include "ocm/stats.hpp"

namespace ocm {

enum class StrategyKind { OptimalSingle, NashTwo, ConstantTrade, HalfTradeHalfGenerate, OnlyGenerate };

const char* to_string(StrategyKind kind) noexcept;
StrategyKind strategy_from_string(std::string_view name);  // throws ConfigError

// A policy. Table-driven variants point at a solution owned by the caller.
struct Strategy {
  StrategyKind kind = StrategyKind::ConstantTrade;
  const SinglePlayerSolution* single = nullptr;  // OptimalSingle
  const MultiPeriodSolution* game = nullptr;     // NashTwo, one solution per period

  static Strategy optimal(const SinglePlayerSolution& solution) {
    return {StrategyKind::OptimalSingle, &solution, nullptr};
  }
  static Strategy nash(const MultiPeriodSolution& solution) {
    return {StrategyKind::NashTwo, nullptr, &solution};
  }
  static Strategy naive(StrategyKind kind) { return {kind, nullptr, nullptr}; }

  std::size_t players() const noexcept { return kind == StrategyKind::NashTwo ? 2 : 1; }
};

// Market, players and the time grid over [0, T]; the grid's step count is split evenly
// across compliance periods.
struct SimContext {
  MarketParams market;
  std::vector<PlayerSpec> players;
  GridSpec grid;
};

struct SimOptions {
  std::size_t paths = 5000;
  std::uint64_t seed = 12345;
  double te_level = 0.95;
  unsigned threads = 1;
  bool record_steps = false;   // keep per-step traces in each PathRecord
  bool naive_impact = true;    // naive generations move their own price path
  // Charge the quadratic friction in reported PnL. The friction is accrued in every
  // ledger either way.
  bool pnl_friction = false;
};

// Cash and inventory accounting of one player along one path.
struct PlayerLedger {
  double initial_inventory = 0.0;
  double traded = 0.0;  // sum of rate * dt
  std::size_t generation_events = 0;
  double submitted = 0.0;  // sum over compliance dates
  double trading_cost = 0.0;
  double friction_cost = 0.0;
  double generation_cost = 0.0;
  std::vector<double> penalties;  // one per compliance date reached
  bool charge_friction = true;

  // x = x0 + sum(rate dt) + xi * events - submitted, evaluated in that order.
  double inventory(double gen_lot) const noexcept {
    return initial_inventory + traded + gen_lot * static_cast<double>(generation_events) - submitted;
  }
  double generated(double gen_lot) const noexcept {
    return gen_lot * static_cast<double>(generation_events);
  }
  double penalty_total() const noexcept;
  // -trading - friction (if charged) - generation + penalties
  double pnl() const noexcept;
};

// Per-step trace; entry n describes step [t_n, t_{n+1}) over the concatenated periods,
// with a final entry for the end state (rate 0, no generation).
struct StepTrace {
  std::vector<double> t;
  std::vector<double> s;  // price at the start of the step, before any impact
  std::vector<std::array<double, 2>> x;
  std::vector<std::array<double, 2>> rate;
  std::vector<std::array<unsigned char, 2>> generate;
};

struct PathRecord {
  std::size_t index = 0;
  std::vector<PlayerLedger> ledgers;
  double final_price = 0.0;
  StepTrace trace;
};

struct StrategyResult {
  StrategyKind kind = StrategyKind::ConstantTrade;
  std::vector<SimStats> stats;  // one per player
  std::vector<PathRecord> paths;
};

// Surfaces of a table-driven policy at one time slice. For one player `generate` holds
// the 0/1 decision region; for two players the generation probabilities.
struct PolicySlices {
  const GridSpec* grid = nullptr;
  std::size_t players = 1;
  std::array<const Slice*, 2> trade_rate{};
  std::array<const Slice*, 2> generate{};
};

struct SimState {
  std::array<double, 2> x{0.0, 0.0};
  double s = 0.0;
};

struct StepAction {
  std::array<bool, 2> generate{false, false};
  std::array<double, 2> rate{0.0, 0.0};
  double s_after = 0.0;  // price after this step's generation impact
};

// Generation by nearest-node lookup (decision) or u_m < pi_m (probability), then the
// impact of every generating player, then the trade rate by multilinear interpolation
// at the post-generation state. Out-of-grid states are clamped.
StepAction execute_policy_step(const PolicySlices& slices, const SimState& state,
                               const std::array<double, 2>& uniforms, const MarketParams& market,
                               std::span<const PlayerSpec> players);

// Naive rules for one player inside compliance period `period` at local step k of
// `steps`: ConstantTrade trades R_l / (period length); HalfTradeHalfGenerate does so for
// the first half of the steps and then generates every step until x >= R_l; OnlyGenerate
// generates every step until x >= R_l.
StepAction naive_step(StrategyKind kind, const SimState& state, const PlayerSpec& player,
                      const MarketParams& market, std::size_t period, std::size_t k,
                      std::size_t steps, bool impact);

// Common random numbers: the price noise of path p depends only on (seed, p), so every
// strategy sees the same Brownian draws; impact is strategy-specific.
std::vector<StrategyResult> run_simulation(const std::vector<Strategy>& strategies,
                                           const SimContext& context, const SimOptions& options);

// Statistics of one player, leaving te_available false when there are too few samples.
SimStats summarize(const std::vector<PathRecord>& paths, std::size_t player, double gen_lot,
                   double te_level);

}  // namespace ocm
