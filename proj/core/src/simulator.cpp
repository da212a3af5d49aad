#include "ocm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "ocm/error.hpp"
#include "ocm/parallel.hpp"
#include "ocm/two_player.hpp"

namespace ocm {

const char* to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::OptimalSingle: return "optimal_single";
    case StrategyKind::NashTwo: return "nash_two";
    case StrategyKind::ConstantTrade: return "constant_trade";
    case StrategyKind::HalfTradeHalfGenerate: return "half_trade_half_generate";
    case StrategyKind::OnlyGenerate: return "only_generate";
  }
  return "unknown";
}

StrategyKind strategy_from_string(std::string_view name) {
  for (StrategyKind k : {StrategyKind::OptimalSingle, StrategyKind::NashTwo,
                         StrategyKind::ConstantTrade, StrategyKind::HalfTradeHalfGenerate,
                         StrategyKind::OnlyGenerate}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("run.strategies", "unknown strategy '" + std::string(name) + "'");
}

double PlayerLedger::penalty_total() const noexcept {
  double total = 0.0;
  for (double p : penalties) total += p;
  return total;
}

double PlayerLedger::pnl() const noexcept {
  return -trading_cost - (charge_friction ? friction_cost : 0.0) - generation_cost + penalty_total();
}

namespace {

constexpr double kReachTolerance = 1e-9;

std::size_t nearest_index(double v, const Axis& axis) noexcept {
  const double u = std::round((v - axis.min) / axis.step);
  return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(axis.count - 1)));
}

double blend(double lo, double hi, double w) noexcept {
  return w == 0.0 ? lo : (1.0 - w) * lo + w * hi;
}

double bilinear(const Slice& surface, double x, double s, const GridSpec& grid) noexcept {
  const PriceWeights wx = locate_price(x, grid.inventory);
  const PriceWeights ws = locate_price(s, grid.price);
  const double lo = interpolate_row(surface.row(wx.index), ws);
  if (wx.upper_weight == 0.0) return lo;
  return blend(lo, interpolate_row(surface.row(wx.index + 1), ws), wx.upper_weight);
}

double trilinear(const Slice& surface, double x1, double x2, double s, const GridSpec& grid) noexcept {
  const std::size_t I = grid.inventory.count;
  const PriceWeights w1 = locate_price(x1, grid.inventory);
  const PriceWeights w2 = locate_price(x2, grid.inventory);
  const PriceWeights ws = locate_price(s, grid.price);
  const auto along2 = [&](std::size_t i1) {
    const double lo = interpolate_row(surface.row(pair_cell(i1, w2.index, I)), ws);
    if (w2.upper_weight == 0.0) return lo;
    return blend(lo, interpolate_row(surface.row(pair_cell(i1, w2.index + 1, I)), ws),
                 w2.upper_weight);
  };
  const double lo = along2(w1.index);
  if (w1.upper_weight == 0.0) return lo;
  return blend(lo, along2(w1.index + 1), w1.upper_weight);
}

}  // namespace

StepAction execute_policy_step(const PolicySlices& slices, const SimState& state,
                               const std::array<double, 2>& uniforms, const MarketParams& market,
                               std::span<const PlayerSpec> players) {
  const GridSpec& grid = *slices.grid;
  const std::size_t P = slices.players;
  if (P < 1 || P > 2 || players.size() < P) throw DomainError("execute_policy_step: bad player count");
  StepAction action;
  double lot = 0.0;
  SimState after = state;
  if (P == 1) {
    const std::size_t i = nearest_index(state.x[0], grid.inventory);
    const std::size_t j = nearest_index(state.s, grid.price);
    action.generate[0] = (*slices.generate[0])(i, j) >= 0.5;
  } else {
    const std::size_t cell = pair_cell(nearest_index(state.x[0], grid.inventory),
                                       nearest_index(state.x[1], grid.inventory),
                                       grid.inventory.count);
    const std::size_t j = nearest_index(state.s, grid.price);
    for (std::size_t m = 0; m < 2; ++m) {
      action.generate[m] = uniforms[m] < (*slices.generate[m])(cell, j);
    }
  }
  for (std::size_t m = 0; m < P; ++m) {
    if (!action.generate[m]) continue;
    lot += players[m].gen_lot;
    after.x[m] += players[m].gen_lot;
  }
  action.s_after = lot > 0.0 ? apply_generation_impact({0.0, state.s}, lot, market.eta).s : state.s;
  for (std::size_t m = 0; m < P; ++m) {
    action.rate[m] = P == 1 ? bilinear(*slices.trade_rate[0], after.x[0], action.s_after, grid)
                            : trilinear(*slices.trade_rate[m], after.x[0], after.x[1],
                                        action.s_after, grid);
  }
  return action;
}

StepAction naive_step(StrategyKind kind, const SimState& state, const PlayerSpec& player,
                      const MarketParams& market, std::size_t period, std::size_t k,
                      std::size_t steps, bool impact) {
  const double requirement = player.requirement(period);
  const double length = market.period_end(period) - market.period_start(period);
  const bool short_of_requirement = state.x[0] < requirement - kReachTolerance;
  StepAction action;
  switch (kind) {
    case StrategyKind::ConstantTrade:
      action.rate[0] = requirement / length;
      break;
    case StrategyKind::HalfTradeHalfGenerate:
      if (2 * k < steps) {
        action.rate[0] = requirement / length;
      } else {
        action.generate[0] = short_of_requirement;
      }
      break;
    case StrategyKind::OnlyGenerate:
      action.generate[0] = short_of_requirement;
      break;
    default:
      throw DomainError(std::string("naive_step: ") + to_string(kind) + " is not a naive strategy");
  }
  action.s_after = action.generate[0] && impact
                       ? apply_generation_impact({0.0, state.s}, player.gen_lot, market.eta).s
                       : state.s;
  return action;
}

namespace {

// Uniform on [0, 1) from the top 53 bits.
double next_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::mt19937_64 substream(std::uint64_t seed, std::size_t path, std::uint32_t stream) {
  const auto p = static_cast<std::uint64_t>(path);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32), stream};
  return std::mt19937_64(seq);
}

struct PathState {
  std::mt19937_64 noise;
  std::normal_distribution<double> normal;
  std::array<std::mt19937_64, 2> coin;
  double s = 0.0;
};

// Source of the policy surfaces at (period, step).
class TableSource {
 public:
  virtual ~TableSource() = default;
  virtual void prepare(std::size_t period, std::size_t k) = 0;
  PolicySlices slices;
};

class SingleTable final : public TableSource {
 public:
  explicit SingleTable(const SinglePlayerSolution& sol) : sol_(sol) {
    slices.grid = &sol_.grid;
    slices.players = 1;
  }
  void prepare(std::size_t, std::size_t k) override {
    slices.trade_rate[0] = &sol_.trade_rate[k];
    slices.generate[0] = &sol_.decision[k];
  }

 private:
  const SinglePlayerSolution& sol_;
};

class GameTable final : public TableSource {
 public:
  explicit GameTable(const MultiPeriodSolution& sol) : sol_(sol) { slices.players = 2; }
  void prepare(std::size_t period, std::size_t k) override {
    const TwoPlayerSolution& p = sol_.periods.at(period);
    slices.grid = &p.grid;
    for (std::size_t m = 0; m < 2; ++m) {
      rate_[m] = p.slice(SurfaceRole::TradeRate, m, k);
      prob_[m] = p.slice(SurfaceRole::GenProbability, m, k);
      slices.trade_rate[m] = &rate_[m];
      slices.generate[m] = &prob_[m];
    }
  }

 private:
  const MultiPeriodSolution& sol_;
  std::array<Slice, 2> rate_;
  std::array<Slice, 2> prob_;
};

StrategyResult simulate_strategy(const Strategy& strategy, const SimContext& context,
                                 const SimOptions& options) {
  MarketParams market = context.market;
  std::vector<PlayerSpec> players = context.players;
  std::vector<GridSpec> grids;
  std::unique_ptr<TableSource> table;
  const bool naive = strategy.kind != StrategyKind::OptimalSingle && strategy.kind != StrategyKind::NashTwo;

  switch (strategy.kind) {
    case StrategyKind::OptimalSingle:
      if (!strategy.single) throw DomainError("optimal strategy needs a single-player solution");
      market = strategy.single->market;
      players = {strategy.single->player};
      grids = {strategy.single->grid};
      table = std::make_unique<SingleTable>(*strategy.single);
      break;
    case StrategyKind::NashTwo:
      if (!strategy.game || strategy.game->periods.empty()) {
        throw DomainError("Nash strategy needs a two-player solution");
      }
      market = strategy.game->periods.front().market;
      players = {strategy.game->periods.front().players[0], strategy.game->periods.front().players[1]};
      for (const TwoPlayerSolution& p : strategy.game->periods) grids.push_back(p.grid);
      table = std::make_unique<GameTable>(*strategy.game);
      break;
    default:
      market.validate();
      if (players.empty()) throw ConfigError("players", "naive strategies need a player");
      players.resize(1);
      players[0].validate(market.periods());
      grids = period_grids(market, context.grid);
      break;
  }
  if (options.paths == 0) throw ConfigError("run.paths", "must be > 0");
  if (grids.size() != market.periods()) throw DomainError("simulation: one grid per period required");

  const std::size_t P = strategy.players();
  const std::size_t n_paths = options.paths;
  std::vector<PathState> state(n_paths);
  std::vector<PathRecord> records(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    state[p].noise = substream(options.seed, p, 0);
    state[p].coin = {substream(options.seed, p, 1), substream(options.seed, p, 2)};
    state[p].s = market.initial_price;
    records[p].index = p;
    records[p].ledgers.resize(P);
    for (PlayerLedger& led : records[p].ledgers) led.charge_friction = options.pnl_friction;
  }

  const bool impact = !naive || options.naive_impact;
  for (std::size_t l = 0; l < grids.size(); ++l) {
    const GridSpec& g = grids[l];
    const std::size_t N = g.time.steps;
    const double dt = g.time.dt();
    for (std::size_t k = 0; k < N; ++k) {
      if (table) table->prepare(l, k);
      const double t = g.time.node(k);
      parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
          PathState& ps = state[p];
          PathRecord& rec = records[p];
          SimState now;
          now.s = ps.s;
          for (std::size_t m = 0; m < P; ++m) now.x[m] = rec.ledgers[m].inventory(players[m].gen_lot);
          const std::array<double, 2> u{next_uniform(ps.coin[0]), next_uniform(ps.coin[1])};

          const StepAction a = table ? execute_policy_step(table->slices, now, u, market, players)
                                     : naive_step(strategy.kind, now, players[0], market, l, k, N, impact);
          if (options.record_steps) {
            rec.trace.t.push_back(t);
            rec.trace.s.push_back(now.s);
            rec.trace.x.push_back(now.x);
            rec.trace.rate.push_back(a.rate);
            rec.trace.generate.push_back({static_cast<unsigned char>(a.generate[0]),
                                          static_cast<unsigned char>(a.generate[1])});
          }

          const double s = a.s_after;
          for (std::size_t m = 0; m < P; ++m) {
            PlayerLedger& led = rec.ledgers[m];
            if (a.generate[m]) {
              ++led.generation_events;
              led.generation_cost += players[m].gen_cost;
            }
            const double nu = a.rate[m];
            led.trading_cost += s * nu * dt;
            led.friction_cost += 0.5 * market.kappa * nu * nu * dt;
            led.traded += nu * dt;
          }
          const double z = ps.normal(ps.noise);
          ps.s = bridge_transition_sample({t, s}, dt, market.penalty, g.time.end, market.sigma, z).s;

          if (k + 1 == N) {
            for (std::size_t m = 0; m < P; ++m) {
              PlayerLedger& led = rec.ledgers[m];
              const double x = led.inventory(players[m].gen_lot);
              const double requirement = players[m].requirement(l);
              led.penalties.push_back(penalty_value(x, requirement, market.penalty));
              led.submitted += std::min(x, requirement);
            }
          }
        }
      });
    }
  }

  StrategyResult result;
  result.kind = strategy.kind;
  for (std::size_t p = 0; p < n_paths; ++p) {
    PathRecord& rec = records[p];
    rec.final_price = state[p].s;
    if (options.record_steps) {
      rec.trace.t.push_back(market.horizon);
      rec.trace.s.push_back(rec.final_price);
      std::array<double, 2> x{0.0, 0.0};
      for (std::size_t m = 0; m < P; ++m) x[m] = rec.ledgers[m].inventory(players[m].gen_lot);
      rec.trace.x.push_back(x);
      rec.trace.rate.push_back({0.0, 0.0});
      rec.trace.generate.push_back({0, 0});
    }
  }
  for (std::size_t m = 0; m < P; ++m) {
    result.stats.push_back(summarize(records, m, players[m].gen_lot, options.te_level));
  }
  result.paths = std::move(records);
  return result;
}

}  // namespace

SimStats summarize(const std::vector<PathRecord>& paths, std::size_t player, double gen_lot,
                   double te_level) {
  std::vector<double> pnl, generated;
  pnl.reserve(paths.size());
  generated.reserve(paths.size());
  for (const PathRecord& r : paths) {
    pnl.push_back(r.ledgers.at(player).pnl());
    generated.push_back(r.ledgers.at(player).generated(gen_lot));
  }
  return describe_samples(pnl, generated, te_level);
}

std::vector<StrategyResult> run_simulation(const std::vector<Strategy>& strategies,
                                           const SimContext& context, const SimOptions& options) {
  std::vector<StrategyResult> out;
  out.reserve(strategies.size());
  for (const Strategy& s : strategies) out.push_back(simulate_strategy(s, context, options));
  return out;
}

}  // namespace ocm
