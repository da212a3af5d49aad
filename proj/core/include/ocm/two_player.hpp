#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "ocm/grid.hpp"
#include "ocm/market.hpp"
#include "ocm/single_player.hpp"
#include "ocm/slice_store.hpp"

namespace ocm {

// Both players share the inventory axis of the grid. A two-player cell packs the pair of
// inventory indices as cell = i1 * I + i2.
inline std::size_t pair_cell(std::size_t i1, std::size_t i2, std::size_t count) noexcept {
  return i1 * count + i2;
}

// Histories of a two-player solve live in `store` (whichever of value, continuation,
// gen_probability and trade_rate its layout lists, for both players and k = 0..N).
// Slice conventions follow the single-player solver: trade_rate[k] is used on
// [t_k, t_{k+1}) and gen_probability[N] = trade_rate[N] = 0.
struct TwoPlayerSolution {
  MarketParams market;
  std::array<PlayerSpec, 2> players;
  GridSpec grid;
  std::size_t period = 0;  // compliance period whose requirements and pin this grid uses
  std::shared_ptr<SliceStore> store;
  std::array<Slice, 2> initial_value;  // V^{(m)} at k = 0
  std::size_t degenerate_games = 0;    // stage games with a continuum of equilibria

  Slice slice(SurfaceRole role, std::size_t player, std::size_t k) const {
    return store->read(k, role, player);
  }
};

// Layout for a two-player history on `grid` with the given roles.
StoreLayout two_player_layout(const GridSpec& grid,
                              std::vector<SurfaceRole> roles = {SurfaceRole::Value,
                                                                SurfaceRole::GenProbability,
                                                                SurfaceRole::TradeRate});

// U^{(m)*}_{k-1} along the price axis at interior own-inventory state (i1, i2): the
// single-player implicit step with the explicit gradient taken in player m's own
// coordinate. Throws DomainError when the own index is a boundary node.
std::vector<double> continuation_step_2p(std::size_t m, std::size_t k, std::size_t i1,
                                         std::size_t i2, const Slice& v_next,
                                         const MarketParams& market, const GridSpec& grid);

// Whole continuation slice for player m: interior own-coordinate rows solved, the two
// own-coordinate boundary rows of every line extrapolated linearly.
Slice continuation_slice_2p(std::size_t m, std::size_t k, const Slice& v_next,
                            const MarketParams& market, const GridSpec& grid,
                            unsigned threads = 1);

// (d_{x_m} V^{(m)} - s_j) / kappa at (i1, i2, j).
double trade_rate_2p(std::size_t m, const Slice& v, std::size_t i1, std::size_t i2, std::size_t j,
                     const MarketParams& market, const GridSpec& grid) noexcept;

// Single compliance date; terminal slices G^{(m)}(x_m) with requirement R^{(m)}_1.
// A null `store` gets an in-memory store with the default roles.
TwoPlayerSolution solve_two(const MarketParams& market, const std::array<PlayerSpec, 2>& players,
                            const GridSpec& grid, std::shared_ptr<SliceStore> store = nullptr,
                            const SolverOptions& options = {});

// Backward induction over `grid` (one compliance period) from arbitrary terminal slices.
TwoPlayerSolution solve_two_from_terminal(const MarketParams& market,
                                          const std::array<PlayerSpec, 2>& players,
                                          const GridSpec& grid, std::size_t period,
                                          std::array<Slice, 2> terminal,
                                          std::shared_ptr<SliceStore> store = nullptr,
                                          const SolverOptions& options = {});

}  // namespace ocm
