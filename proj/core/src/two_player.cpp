#include "ocm/two_player.hpp"

#include <atomic>
#include <string>

#include "ocm/bimatrix.hpp"
#include "ocm/error.hpp"
#include "ocm/parallel.hpp"

namespace ocm {

namespace {

// Player m's own coordinate: stride between neighbours and the own index of a cell.
std::size_t own_stride(std::size_t m, std::size_t count) noexcept { return m == 0 ? count : 1; }

std::size_t own_index(std::size_t m, std::size_t i1, std::size_t i2) noexcept {
  return m == 0 ? i1 : i2;
}

void check_player(std::size_t m) {
  if (m > 1) throw DomainError("player index must be 0 or 1");
}

void write_if(SliceStore& store, std::size_t k, SurfaceRole role, std::size_t m, const Slice& s) {
  if (store.layout().has(role)) store.write(k, role, m, s);
}

}  // namespace

StoreLayout two_player_layout(const GridSpec& grid, std::vector<SurfaceRole> roles) {
  const std::size_t I = grid.inventory.count;
  return {grid.time.steps, 2, I * I, grid.price.count, std::move(roles)};
}

std::vector<double> continuation_step_2p(std::size_t m, std::size_t k, std::size_t i1,
                                         std::size_t i2, const Slice& v_next,
                                         const MarketParams& market, const GridSpec& grid) {
  check_player(m);
  const std::size_t I = grid.inventory.count;
  const std::size_t own = own_index(m, i1, i2);
  if (own == 0 || own + 1 >= I) {
    throw DomainError("continuation_step_2p: own inventory index " + std::to_string(own) +
                      " is a boundary node");
  }
  const PriceSystem system(k, market, grid);
  const std::size_t cell = pair_cell(i1, i2, I);
  std::vector<double> u(grid.price.count, 0.0);
  for (std::size_t j = 1; j + 1 < u.size(); ++j) {
    u[j] = rhs_h_along(v_next, cell, own_stride(m, I), j, market, grid);
  }
  system.solve(u);
  return u;
}

Slice continuation_slice_2p(std::size_t m, std::size_t k, const Slice& v_next,
                            const MarketParams& market, const GridSpec& grid, unsigned threads) {
  check_player(m);
  const std::size_t I = grid.inventory.count;
  const std::size_t J = grid.price.count;
  const std::size_t stride = own_stride(m, I);
  const PriceSystem system(k, market, grid);
  Slice u(I * I, J);

  // Lines run along the own coordinate; `other` indexes the opponent's inventory.
  parallel_for(I, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t other = begin; other < end; ++other) {
      const std::size_t first = m == 0 ? other : other * I;
      for (std::size_t own = 1; own + 1 < I; ++own) {
        const std::size_t cell = first + own * stride;
        std::span<double> row = u.row(cell);
        for (std::size_t j = 1; j + 1 < J; ++j) {
          row[j] = rhs_h_along(v_next, cell, stride, j, market, grid);
        }
        system.solve(row);
      }
      inventory_extrapolate_line(u, first, stride, I);
    }
  });
  return u;
}

double trade_rate_2p(std::size_t m, const Slice& v, std::size_t i1, std::size_t i2, std::size_t j,
                     const MarketParams& market, const GridSpec& grid) noexcept {
  const std::size_t I = grid.inventory.count;
  const InventoryDifferences d = inventory_differences(
      v, pair_cell(i1, i2, I), own_stride(m, I), own_index(m, i1, i2), I, j, grid.inventory.step);
  return feedback_rate(d, grid.price.node(j), market.kappa, grid.gradient);
}

TwoPlayerSolution solve_two(const MarketParams& market, const std::array<PlayerSpec, 2>& players,
                            const GridSpec& grid, std::shared_ptr<SliceStore> store,
                            const SolverOptions& options) {
  market.validate();
  if (market.periods() != 1) {
    throw ConfigError("market.compliance_dates", "two-player solve needs exactly one date");
  }
  for (const PlayerSpec& p : players) p.validate(1);
  grid.validate(players);

  const std::size_t I = grid.inventory.count;
  const std::size_t J = grid.price.count;
  std::array<Slice, 2> terminal{Slice(I * I, J), Slice(I * I, J)};
  for (std::size_t m = 0; m < 2; ++m) {
    const double requirement = players[m].requirement(0);
    for (std::size_t i1 = 0; i1 < I; ++i1) {
      for (std::size_t i2 = 0; i2 < I; ++i2) {
        const double x = grid.inventory.node(own_index(m, i1, i2));
        const double g = penalty_value(x, requirement, market.penalty);
        for (std::size_t j = 0; j < J; ++j) terminal[m](pair_cell(i1, i2, I), j) = g;
      }
    }
  }
  return solve_two_from_terminal(market, players, grid, 0, std::move(terminal), std::move(store),
                                 options);
}

TwoPlayerSolution solve_two_from_terminal(const MarketParams& market,
                                          const std::array<PlayerSpec, 2>& players,
                                          const GridSpec& grid, std::size_t period,
                                          std::array<Slice, 2> terminal,
                                          std::shared_ptr<SliceStore> store,
                                          const SolverOptions& options) {
  market.validate();
  for (const PlayerSpec& p : players) p.validate(market.periods());
  grid.validate(players);
  if (period >= market.periods()) throw DomainError("solve_two: period index out of range");

  const std::size_t I = grid.inventory.count;
  const std::size_t J = grid.price.count;
  const std::size_t N = grid.time.steps;
  for (const Slice& t : terminal) {
    if (t.cells() != I * I || t.prices() != J) {
      throw DomainError("solve_two: terminal slice shape does not match the grid");
    }
  }
  if (!store) store = std::make_shared<MemorySliceStore>(two_player_layout(grid));
  if (store->layout() != two_player_layout(grid, store->layout().roles)) {
    throw DomainError("solve_two: store layout does not match the grid");
  }

  const std::array<std::size_t, 2> shift{
      lattice_steps(players[0].gen_lot, grid.inventory.step, "players[0].gen_lot"),
      lattice_steps(players[1].gen_lot, grid.inventory.step, "players[1].gen_lot")};

  TwoPlayerSolution sol{market, players, grid, period, store, {}, 0};
  std::array<Slice, 2> v_next = std::move(terminal);
  const Slice zero(I * I, J, 0.0);
  for (std::size_t m = 0; m < 2; ++m) {
    write_if(*store, N, SurfaceRole::Value, m, v_next[m]);
    write_if(*store, N, SurfaceRole::Continuation, m, v_next[m]);
    write_if(*store, N, SurfaceRole::GenProbability, m, zero);
    write_if(*store, N, SurfaceRole::TradeRate, m, zero);
  }

  std::atomic<std::size_t> degenerate{0};
  for (std::size_t k = N; k >= 1; --k) {
    const std::array<Slice, 2> u{continuation_slice_2p(0, k, v_next[0], market, grid, options.threads),
                                 continuation_slice_2p(1, k, v_next[1], market, grid, options.threads)};
    std::array<Slice, 2> v{Slice(I * I, J), Slice(I * I, J)};
    std::array<Slice, 2> pi{Slice(I * I, J), Slice(I * I, J)};
    std::array<Slice, 2> rate{Slice(I * I, J), Slice(I * I, J)};

    parallel_for(I, options.threads, [&](std::size_t begin, std::size_t end) {
      std::size_t local_degenerate = 0;
      for (std::size_t i1 = begin; i1 < end; ++i1) {
        for (std::size_t i2 = 0; i2 < I; ++i2) {
          const std::size_t cell = pair_cell(i1, i2, I);
          const std::array<bool, 2> can{i1 + shift[0] < I, i2 + shift[1] < I};
          const std::array<std::size_t, 2> gen_cell{can[0] ? pair_cell(i1 + shift[0], i2, I) : cell,
                                                    can[1] ? pair_cell(i1, i2 + shift[1], I) : cell};
          for (std::size_t j = 0; j < J; ++j) {
            const Game2x2 game = build_stage_game({&u[0], &u[1]}, cell, gen_cell, can,
                                                  grid.price.node(j), players, market, grid.price);
            const StageSolution stage = solve_stage_game(game);
            if (stage.degenerate) ++local_degenerate;
            for (std::size_t m = 0; m < 2; ++m) {
              v[m](cell, j) = aggregate_nash_value(game, stage.equilibrium, m);
              pi[m](cell, j) = stage.equilibrium.gen_prob[m];
              rate[m](cell, j) = trade_rate_2p(m, v_next[m], i1, i2, j, market, grid);
            }
          }
        }
      }
      degenerate += local_degenerate;
    });

    for (std::size_t m = 0; m < 2; ++m) {
      require_finite(v[m], m == 0 ? "player 1 value surface" : "player 2 value surface", k - 1);
      write_if(*store, k - 1, SurfaceRole::Value, m, v[m]);
      write_if(*store, k - 1, SurfaceRole::Continuation, m, u[m]);
      write_if(*store, k - 1, SurfaceRole::GenProbability, m, pi[m]);
      write_if(*store, k - 1, SurfaceRole::TradeRate, m, rate[m]);
    }
    v_next = std::move(v);
  }
  sol.initial_value = std::move(v_next);
  sol.degenerate_games = degenerate.load();
  return sol;
}

}  // namespace ocm
