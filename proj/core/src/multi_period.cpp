#include "ocm/multi_period.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ocm/error.hpp"

namespace ocm {

std::vector<GridSpec> period_grids(const MarketParams& market, const GridSpec& grid) {
  const std::size_t L = market.periods();
  if (grid.time.steps % L != 0) {
    throw ConfigError("grid.time_steps", "must split evenly across " + std::to_string(L) + " periods");
  }
  const std::size_t per = grid.time.steps / L;
  if (per < 2) throw ConfigError("grid.time_steps", "each period needs at least 2 time steps");
  std::vector<GridSpec> out;
  for (std::size_t l = 0; l < L; ++l) {
    GridSpec g = grid;
    g.time = {market.period_start(l), market.period_end(l), per};
    out.push_back(g);
  }
  return out;
}

namespace {

std::size_t rolled_index(std::size_t i, double requirement, const Axis& axis) {
  const double rolled = rollover_inventory(axis.node(i), requirement);
  const double u = std::round((rolled - axis.min) / axis.step);
  return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(axis.count - 1)));
}

}  // namespace

std::array<Slice, 2> stitched_terminal(const MarketParams& market,
                                       const std::array<PlayerSpec, 2>& players,
                                       const GridSpec& grid, std::size_t period,
                                       const std::array<Slice, 2>& next_initial) {
  const std::size_t I = grid.inventory.count;
  const std::size_t J = grid.price.count;
  for (const Slice& s : next_initial) {
    if (s.cells() != I * I || s.prices() != J) {
      throw DomainError("stitched_terminal: next-period slice shape does not match the grid");
    }
  }
  std::array<Slice, 2> out{Slice(I * I, J), Slice(I * I, J)};
  std::vector<std::size_t> roll1(I), roll2(I);
  for (std::size_t i = 0; i < I; ++i) {
    roll1[i] = rolled_index(i, players[0].requirement(period), grid.inventory);
    roll2[i] = rolled_index(i, players[1].requirement(period), grid.inventory);
  }
  for (std::size_t i1 = 0; i1 < I; ++i1) {
    for (std::size_t i2 = 0; i2 < I; ++i2) {
      const std::size_t cell = pair_cell(i1, i2, I);
      const std::size_t next = pair_cell(roll1[i1], roll2[i2], I);
      const std::array<double, 2> g{
          penalty_value(grid.inventory.node(i1), players[0].requirement(period), market.penalty),
          penalty_value(grid.inventory.node(i2), players[1].requirement(period), market.penalty)};
      for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t j = 0; j < J; ++j) out[m](cell, j) = g[m] + next_initial[m](next, j);
      }
    }
  }
  return out;
}

MultiPeriodSolution solve_multi(const MarketParams& market, const std::array<PlayerSpec, 2>& players,
                                const GridSpec& grid, const StoreFactory& stores,
                                const SolverOptions& options) {
  market.validate();
  for (const PlayerSpec& p : players) p.validate(market.periods());
  const std::vector<GridSpec> grids = period_grids(market, grid);
  const std::size_t L = grids.size();

  MultiPeriodSolution sol;
  sol.periods.resize(L);
  for (std::size_t l = L; l-- > 0;) {
    const GridSpec& g = grids[l];
    std::shared_ptr<SliceStore> store = stores ? stores(l, two_player_layout(g)) : nullptr;
    std::array<Slice, 2> terminal;
    if (l + 1 == L) {
      const std::size_t I = g.inventory.count;
      terminal = {Slice(I * I, g.price.count), Slice(I * I, g.price.count)};
      for (std::size_t i1 = 0; i1 < I; ++i1) {
        for (std::size_t i2 = 0; i2 < I; ++i2) {
          const std::array<double, 2> x{g.inventory.node(i1), g.inventory.node(i2)};
          for (std::size_t m = 0; m < 2; ++m) {
            const double v = penalty_value(x[m], players[m].requirement(l), market.penalty);
            for (std::size_t j = 0; j < g.price.count; ++j) terminal[m](pair_cell(i1, i2, I), j) = v;
          }
        }
      }
    } else {
      terminal = stitched_terminal(market, players, g, l, sol.periods[l + 1].initial_value);
    }
    sol.periods[l] = solve_two_from_terminal(market, players, g, l, std::move(terminal),
                                             std::move(store), options);
  }
  return sol;
}

}  // namespace ocm
