#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ocm/bimatrix.hpp"
#include "ocm/config.hpp"
#include "ocm/grid.hpp"
#include "ocm/simulator.hpp"
#include "ocm/single_player.hpp"

using namespace ocm;

static void BM_Tridiagonal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(n), b(n), c(n), rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = u(rng);
    c[j] = u(rng);
    b[j] = 3.0 + u(rng);
    rhs[j] = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_tridiagonal(a, b, c, rhs));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_Tridiagonal)->Arg(61)->Arg(241)->Arg(1001);

static void BM_StageGame(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-2, 2);
  std::vector<Game2x2> games(1024);
  for (Game2x2& g : games) {
    for (auto& row : g.a) for (double& v : row) v = entry(rng);
    for (auto& row : g.b) for (double& v : row) v = entry(rng);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_stage_game(games[i++ & 1023]));
  }
}
BENCHMARK(BM_StageGame);

static void BM_SolveSingle(benchmark::State& state) {
  const Config c = load_preset("single_base", {{"grid.time_steps", std::to_string(state.range(0))}});
  for (auto _ : state) benchmark::DoNotOptimize(solve_single(c.market, c.players[0], c.grid));
}
BENCHMARK(BM_SolveSingle)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_SimulateOptimal(benchmark::State& state) {
  const Config c = load_preset("single_base", {{"grid.time_steps", "200"}});
  const SinglePlayerSolution sol = solve_single(c.market, c.players[0], c.grid);
  SimOptions opt;
  opt.paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_simulation({Strategy::optimal(sol)}, {c.market, c.players, c.grid}, opt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateOptimal)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
