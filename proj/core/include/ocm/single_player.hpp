#pragma once

#include <cstddef>
#include <vector>

#include "ocm/grid.hpp"
#include "ocm/market.hpp"

namespace ocm {

struct SolverOptions {
  unsigned threads = 1;
};

// Output of the single-firm backward induction. Every history is indexed by time slice
// k = 0..N and holds an I x J slice.
//
//  value[k]        V(t_k, x_i, s_j); value[N] is the terminal penalty G.
//  continuation[k] U*(t_k, .) (trading only until t_{k+1}); continuation[N] = value[N].
//  trade_rate[k]   feedback rate used on [t_k, t_{k+1}), i.e. (d_x V(t_{k+1}) - s) / kappa;
//                  trade_rate[N] is 0 (no trading at the compliance date).
//  decision[k]     1 where generating attains the max at t_k, else 0; decision[N] = 0.
struct SinglePlayerSolution {
  MarketParams market;
  PlayerSpec player;
  GridSpec grid;
  std::vector<Slice> value;
  std::vector<Slice> continuation;
  std::vector<Slice> trade_rate;
  std::vector<Slice> decision;
};

// U*(t, x_i + xi, s_j - eta xi) - c, or -infinity when x_i + xi lies above the grid.
double generation_value(const Slice& continuation, std::size_t i, std::size_t j,
                        const PlayerSpec& player, const MarketParams& market, const GridSpec& grid);

// (d_x V - s_j) / kappa; central difference inside, one-sided at the inventory boundary.
double optimal_trade_rate(const Slice& value, std::size_t i, std::size_t j,
                          const MarketParams& market, const GridSpec& grid);

// Requires a single compliance date; uses requirement R_1 of `player`.
SinglePlayerSolution solve_single(const MarketParams& market, const PlayerSpec& player,
                                  const GridSpec& grid, const SolverOptions& options = {});

}  // namespace ocm
