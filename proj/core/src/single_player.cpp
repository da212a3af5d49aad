#include "ocm/single_player.hpp"

#include <limits>

#include "ocm/error.hpp"
#include "ocm/parallel.hpp"

namespace ocm {

double generation_value(const Slice& continuation, std::size_t i, std::size_t j,
                        const PlayerSpec& player, const MarketParams& market, const GridSpec& grid) {
  const std::size_t shift = lattice_steps(player.gen_lot, grid.inventory.step, "players.gen_lot");
  if (i + shift >= continuation.cells()) return -std::numeric_limits<double>::infinity();
  const double s_target = grid.price.node(j) - market.eta * player.gen_lot;
  return shifted_value_lookup(continuation, i + shift, s_target, grid.price) - player.gen_cost;
}

double optimal_trade_rate(const Slice& value, std::size_t i, std::size_t j,
                          const MarketParams& market, const GridSpec& grid) {
  const InventoryDifferences d =
      inventory_differences(value, i, 1, i, value.cells(), j, grid.inventory.step);
  return feedback_rate(d, grid.price.node(j), market.kappa, grid.gradient);
}

SinglePlayerSolution solve_single(const MarketParams& market, const PlayerSpec& player,
                                  const GridSpec& grid, const SolverOptions& options) {
  market.validate();
  player.validate(market.periods());
  if (market.periods() != 1) {
    throw ConfigError("market.compliance_dates", "single-player solve needs exactly one date");
  }
  grid.validate({&player, 1});

  const std::size_t I = grid.inventory.count;
  const std::size_t J = grid.price.count;
  const std::size_t N = grid.time.steps;

  SinglePlayerSolution sol{market, player, grid, {}, {}, {}, {}};
  sol.value.assign(N + 1, Slice(I, J));
  sol.continuation.assign(N + 1, Slice(I, J));
  sol.trade_rate.assign(N + 1, Slice(I, J));
  sol.decision.assign(N + 1, Slice(I, J));

  const double requirement = player.requirement(0);
  for (std::size_t i = 0; i < I; ++i) {
    const double g = penalty_value(grid.inventory.node(i), requirement, market.penalty);
    for (std::size_t j = 0; j < J; ++j) sol.value[N](i, j) = g;
  }
  sol.continuation[N] = sol.value[N];

  for (std::size_t k = N; k >= 1; --k) {
    const Slice& v_next = sol.value[k];
    Slice& u = sol.continuation[k - 1];
    const PriceSystem system(k, market, grid);

    parallel_for(I - 2, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin + 1; i < end + 1; ++i) {
        std::span<double> row = u.row(i);
        for (std::size_t j = 1; j + 1 < J; ++j) row[j] = rhs_h(v_next, i, j, market, grid);
        system.solve(row);
      }
    });
    inventory_extrapolate(u);

    Slice& v = sol.value[k - 1];
    Slice& d = sol.decision[k - 1];
    Slice& rate = sol.trade_rate[k - 1];
    parallel_for(I, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
          const double stay = u(i, j);
          const double generate = generation_value(u, i, j, player, market, grid);
          // Ties go to generation.
          const bool gen = generate >= stay;
          v(i, j) = gen ? generate : stay;
          d(i, j) = gen ? 1.0 : 0.0;
          rate(i, j) = optimal_trade_rate(v_next, i, j, market, grid);
        }
      }
    });
    require_finite(v, "value surface", k - 1);
  }
  return sol;
}

}  // namespace ocm
