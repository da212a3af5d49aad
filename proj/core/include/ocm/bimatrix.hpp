#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ocm/grid.hpp"
#include "ocm/market.hpp"

namespace ocm {

enum Action : std::size_t { Trade = 0, Generate = 1 };

// Payoff of one player from its own point of view: own[my_action][their_action].
using OwnPayoff = std::array<std::array<double, 2>, 2>;

// The 2x2 stage game at one lattice state. a[r][c] and b[r][c] are player 1's and player
// 2's payoffs when player 1 plays r and player 2 plays c. A player whose lot would leave
// the inventory grid cannot generate; the corresponding payoff entries are unused.
struct Game2x2 {
  OwnPayoff a{};
  OwnPayoff b{};
  std::array<bool, 2> can_generate{true, true};

  // Payoff matrix of player m (0 or 1) indexed [own action][opponent action].
  OwnPayoff own(std::size_t m) const noexcept;
  // True when swapping the players leaves the game unchanged bit for bit.
  bool symmetric() const noexcept;
};

enum class EquilibriumKind { Pure, Mixed };

struct MixedEquilibrium {
  std::array<double, 2> gen_prob{0.0, 0.0};  // probability that each player generates
  std::array<double, 2> payoff{0.0, 0.0};    // expected payoff of each player
  EquilibriumKind kind = EquilibriumKind::Pure;
};

struct EquilibriumSet {
  std::vector<MixedEquilibrium> profiles;
  // Some player is indifferent over an entire opponent strategy range, so equilibria form
  // a continuum; only the endpoints (and isolated points) are listed.
  bool degenerate = false;
};

inline constexpr double kIndifferenceTolerance = 1e-12;

// Expected payoff of a player mixing with `own_gen` against an opponent mixing with
// `other_gen`; the bilinear form pi^T P pi in own coordinates.
double expected_payoff(const OwnPayoff& own, double own_gen, double other_gen) noexcept;

// Largest gain available to player m from a pure deviation at profile `gen_prob`.
double deviation_gain(const Game2x2& game, std::size_t m, std::array<double, 2> gen_prob) noexcept;

// Table of shifted continuation lookups at one lattice state.
//   cont[m]        player m's continuation slice U^{(m)*}(t_{k-1}, ., .)
//   cell           current cell i1 * I + i2
//   gen_cell[m]    cell after player m generates (its own coordinate + its lot), valid only
//                  when can_generate[m]
Game2x2 build_stage_game(const std::array<const Slice*, 2>& cont, std::size_t cell,
                         const std::array<std::size_t, 2>& gen_cell,
                         const std::array<bool, 2>& can_generate, double s,
                         const std::array<PlayerSpec, 2>& players, const MarketParams& market,
                         const Axis& price);

// All equilibria by support enumeration, deduplicated.
EquilibriumSet enumerate_equilibria(const Game2x2& game);

// Max payoff sum, then max of the smaller payoff, then larger pi1, then larger pi2.
// Throws DomainError on an empty list.
MixedEquilibrium select_equilibrium(const std::vector<MixedEquilibrium>& candidates);

struct StageSolution {
  MixedEquilibrium equilibrium;
  bool degenerate = false;
};

// Enumerates, keeps only profiles with pi1 == pi2 when the game is symmetric (if any),
// then selects.
StageSolution solve_stage_game(const Game2x2& game);

// Player m's value at the equilibrium: expectation of its payoffs under the mixed profile.
double aggregate_nash_value(const Game2x2& game, const MixedEquilibrium& eq, std::size_t m) noexcept;

}  // namespace ocm
