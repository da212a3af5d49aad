#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "ocm/two_player.hpp"

namespace ocm {

// Supplies the history store for one period; the default keeps everything in memory.
using StoreFactory =
    std::function<std::shared_ptr<SliceStore>(std::size_t period, const StoreLayout& layout)>;

// Splits `grid.time` (covering [0, T]) into one grid per compliance period with equal step
// counts. Throws ConfigError unless the step count divides evenly with at least 2 steps
// per period.
std::vector<GridSpec> period_grids(const MarketParams& market, const GridSpec& grid);

// Terminal slices of period l < L - 1 at T_l: G_l(x_m) + V^{(m)}_{l+1}(T_l, rolled x1,
// rolled x2, s), where `next_initial` holds V^{(m)}_{l+1} at the start of period l + 1 and
// each rolled inventory is (x_m - R^{(m)}_l)_+ on the lattice.
std::array<Slice, 2> stitched_terminal(const MarketParams& market,
                                       const std::array<PlayerSpec, 2>& players,
                                       const GridSpec& grid, std::size_t period,
                                       const std::array<Slice, 2>& next_initial);

struct MultiPeriodSolution {
  std::vector<TwoPlayerSolution> periods;  // indexed by period, 0 first
};

// Solves the last period first and chains backwards. With one date this is solve_two.
MultiPeriodSolution solve_multi(const MarketParams& market, const std::array<PlayerSpec, 2>& players,
                                const GridSpec& grid, const StoreFactory& stores = {},
                                const SolverOptions& options = {});

}  // namespace ocm
