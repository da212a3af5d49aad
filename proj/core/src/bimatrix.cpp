#include "ocm/bimatrix.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "ocm/error.hpp"

namespace ocm {

OwnPayoff Game2x2::own(std::size_t m) const noexcept {
  if (m == 0) return a;
  OwnPayoff p{};
  for (std::size_t mine = 0; mine < 2; ++mine) {
    for (std::size_t theirs = 0; theirs < 2; ++theirs) p[mine][theirs] = b[theirs][mine];
  }
  return p;
}

bool Game2x2::symmetric() const noexcept {
  return can_generate[0] == can_generate[1] && own(0) == own(1);
}

double expected_payoff(const OwnPayoff& own, double own_gen, double other_gen) noexcept {
  const double own_trade = 1.0 - own_gen;
  const double other_trade = 1.0 - other_gen;
  return own_trade * other_trade * own[Trade][Trade] + own_trade * other_gen * own[Trade][Generate] +
         own_gen * other_trade * own[Generate][Trade] + own_gen * other_gen * own[Generate][Generate];
}

double deviation_gain(const Game2x2& game, std::size_t m, std::array<double, 2> gen_prob) noexcept {
  const OwnPayoff p = game.own(m);
  const double mine = gen_prob[m];
  const double theirs = gen_prob[1 - m];
  const double played = expected_payoff(p, mine, theirs);
  double best = expected_payoff(p, 0.0, theirs);
  if (game.can_generate[m]) best = std::max(best, expected_payoff(p, 1.0, theirs));
  return best - played;
}

Game2x2 build_stage_game(const std::array<const Slice*, 2>& cont, std::size_t cell,
                         const std::array<std::size_t, 2>& gen_cell,
                         const std::array<bool, 2>& can_generate, double s,
                         const std::array<PlayerSpec, 2>& players, const MarketParams& market,
                         const Axis& price) {
  std::array<OwnPayoff, 2> own{};
  for (std::size_t m = 0; m < 2; ++m) {
    const std::size_t o = 1 - m;
    const Slice& u = *cont[m];
    const double own_lot = players[m].gen_lot;
    const double other_lot = players[o].gen_lot;
    OwnPayoff& p = own[m];
    p[Trade][Trade] = shifted_value_lookup(u, cell, s, price);
    p[Trade][Generate] =
        can_generate[o] ? shifted_value_lookup(u, cell, s - market.eta * other_lot, price) : 0.0;
    if (can_generate[m]) {
      p[Generate][Trade] =
          shifted_value_lookup(u, gen_cell[m], s - market.eta * own_lot, price) - players[m].gen_cost;
      p[Generate][Generate] =
          can_generate[o]
              ? shifted_value_lookup(u, gen_cell[m], s - market.eta * (own_lot + other_lot), price) -
                    players[m].gen_cost
              : 0.0;
    }
  }
  Game2x2 game;
  game.can_generate = can_generate;
  game.a = own[0];
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) game.b[r][c] = own[1][c][r];
  }
  return game;
}

namespace {

constexpr double kTol = kIndifferenceTolerance;

// Gain of generating over trading as an affine function of the opponent's generation
// probability: gain(q) = first + (second - first) q.
struct Gain {
  double first;   // opponent trades
  double second;  // opponent generates
  double at(double q) const noexcept { return first + (second - first) * q; }
  bool flat() const noexcept { return std::abs(first) <= kTol && std::abs(second) <= kTol; }
};

Gain gain_of(const OwnPayoff& p) noexcept {
  return {p[Generate][Trade] - p[Trade][Trade], p[Generate][Generate] - p[Trade][Generate]};
}

// Opponent mixing that leaves this player indifferent, if it lies strictly inside (0, 1).
std::optional<double> indifference_point(const Gain& g) noexcept {
  const double denom = g.first - g.second;
  if (denom == 0.0) return std::nullopt;
  const double q = g.first / denom;
  if (!(q > 0.0 && q < 1.0)) return std::nullopt;
  return q;
}

bool is_best_response(const Gain& g, bool can_generate, std::size_t action, double q) noexcept {
  if (!can_generate) return action == Trade;
  const double gain = g.at(q);
  return action == Generate ? gain >= -kTol : gain <= kTol;
}

// Interval of the opponent's probability q in [0, 1] on which `action` is a best response.
std::optional<std::pair<double, double>> best_response_interval(const Gain& g, bool can_generate,
                                                                 std::size_t action) noexcept {
  if (!can_generate) {
    if (action == Trade) return std::pair{0.0, 1.0};
    return std::nullopt;
  }
  const bool ok0 = is_best_response(g, true, action, 0.0);
  const bool ok1 = is_best_response(g, true, action, 1.0);
  if (ok0 && ok1) return std::pair{0.0, 1.0};
  if (!ok0 && !ok1) return std::nullopt;
  const double denom = g.first - g.second;
  const double root = denom == 0.0 ? (ok0 ? 1.0 : 0.0) : std::clamp(g.first / denom, 0.0, 1.0);
  return ok0 ? std::pair{0.0, root} : std::pair{root, 1.0};
}

void add_profile(EquilibriumSet& out, const Game2x2& game, double p1, double p2) {
  for (const MixedEquilibrium& e : out.profiles) {
    if (std::abs(e.gen_prob[0] - p1) <= kTol && std::abs(e.gen_prob[1] - p2) <= kTol) return;
  }
  MixedEquilibrium eq;
  eq.gen_prob = {p1, p2};
  eq.payoff = {expected_payoff(game.own(0), p1, p2), expected_payoff(game.own(1), p2, p1)};
  const auto pure = [](double p) { return p == 0.0 || p == 1.0; };
  eq.kind = pure(p1) && pure(p2) ? EquilibriumKind::Pure : EquilibriumKind::Mixed;
  out.profiles.push_back(eq);
}

}  // namespace

EquilibriumSet enumerate_equilibria(const Game2x2& game) {
  const std::array<OwnPayoff, 2> own{game.own(0), game.own(1)};
  const std::array<Gain, 2> gain{gain_of(own[0]), gain_of(own[1])};
  const std::array<bool, 2> can = game.can_generate;
  EquilibriumSet out;

  // Pure profiles.
  for (std::size_t a1 = 0; a1 < 2; ++a1) {
    for (std::size_t a2 = 0; a2 < 2; ++a2) {
      if ((a1 == Generate && !can[0]) || (a2 == Generate && !can[1])) continue;
      const double q1 = static_cast<double>(a1);
      const double q2 = static_cast<double>(a2);
      if (is_best_response(gain[0], can[0], a1, q2) && is_best_response(gain[1], can[1], a2, q1)) {
        add_profile(out, game, q1, q2);
      }
    }
  }

  // One player mixes against the other's pure action. This requires the mixer to be
  // indifferent in that column; the admissible mixing probabilities form an interval.
  for (std::size_t mixer = 0; mixer < 2; ++mixer) {
    const std::size_t other = 1 - mixer;
    if (!can[mixer]) continue;
    for (std::size_t a = 0; a < 2; ++a) {
      if (a == Generate && !can[other]) continue;
      if (std::abs(gain[mixer].at(static_cast<double>(a))) > kTol) continue;
      out.degenerate = true;
      const auto interval = best_response_interval(gain[other], can[other], a);
      if (!interval) continue;
      for (double p : {interval->first, interval->second}) {
        const double pure = static_cast<double>(a);
        if (mixer == 0) {
          add_profile(out, game, p, pure);
        } else {
          add_profile(out, game, pure, p);
        }
      }
    }
  }

  // Both mix: each is made indifferent by the other's probability.
  if (can[0] && can[1] && !gain[0].flat() && !gain[1].flat()) {
    const auto p2 = indifference_point(gain[0]);
    const auto p1 = indifference_point(gain[1]);
    if (p1 && p2) add_profile(out, game, *p1, *p2);
  }
  return out;
}

MixedEquilibrium select_equilibrium(const std::vector<MixedEquilibrium>& candidates) {
  if (candidates.empty()) throw DomainError("select_equilibrium: no candidates");
  const auto better = [](const MixedEquilibrium& x, const MixedEquilibrium& y) {
    const double sx = x.payoff[0] + x.payoff[1];
    const double sy = y.payoff[0] + y.payoff[1];
    if (sx != sy) return sx > sy;
    const double mx = std::min(x.payoff[0], x.payoff[1]);
    const double my = std::min(y.payoff[0], y.payoff[1]);
    if (mx != my) return mx > my;
    if (x.gen_prob[0] != y.gen_prob[0]) return x.gen_prob[0] > y.gen_prob[0];
    return x.gen_prob[1] > y.gen_prob[1];
  };
  MixedEquilibrium best = candidates.front();
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (better(candidates[i], best)) best = candidates[i];
  }
  return best;
}

StageSolution solve_stage_game(const Game2x2& game) {
  EquilibriumSet set = enumerate_equilibria(game);
  if (game.symmetric()) {
    std::vector<MixedEquilibrium> diagonal;
    for (const MixedEquilibrium& e : set.profiles) {
      if (e.gen_prob[0] == e.gen_prob[1]) diagonal.push_back(e);
    }
    if (!diagonal.empty()) return {select_equilibrium(diagonal), set.degenerate};
  }
  return {select_equilibrium(set.profiles), set.degenerate};
}

double aggregate_nash_value(const Game2x2& game, const MixedEquilibrium& eq, std::size_t m) noexcept {
  return expected_payoff(game.own(m), eq.gen_prob[m], eq.gen_prob[1 - m]);
}

}  // namespace ocm
