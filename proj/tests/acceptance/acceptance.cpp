// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.
//
//   ocm_acceptance [work-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "ocm/bimatrix.hpp"
#include "ocm/config.hpp"
#include "ocm/io.hpp"
#include "ocm/single_player.hpp"
#include "ocm/two_player.hpp"
#include "oracles/dense.hpp"
#include "oracles/dp.hpp"
#include "oracles/lattice.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using namespace ocm;

namespace {

// Tolerances and bounds.
constexpr double kSingleMeanLo = -12.50, kSingleMeanHi = -12.40, kSingleTol = 0.05;
constexpr double kSingleTeFloor = -12.52;
constexpr double kGeneratedLo = 4.4, kGeneratedHi = 5.0, kGeneratedShare = 0.85;
constexpr double kHomogMeanLo = -12.50, kHomogMeanHi = -12.30, kHomogTol = 0.06;
constexpr double kHomogTeFloor = -12.52;
constexpr double kHeteroSlack = 0.01;
constexpr double kPeriodFloor = -25.0, kPeriodTarget = -24.89, kPeriodTol = 0.15;
constexpr double kTridiagTol = 1e-10, kRowSumTol = 1e-12, kFrozenTol = 1e-6;
constexpr double kBestResponseTol = 1e-9, kLatticeEps = 1e-2;
constexpr double kOracleTol = 1e-6;
constexpr double kSolveSeconds = 60, kSimulateSeconds = 60, kTwoSeconds = 30 * 60;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double timed_cli(const std::vector<std::string>& args, int& status) {
  const auto t0 = std::chrono::steady_clock::now();
  status = cli::run(args);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_or_throw(const std::vector<std::string>& args, double* seconds = nullptr) {
  int status = 0;
  const double s = timed_cli(args, status);
  if (seconds) *seconds = s;
  if (status != 0) throw std::runtime_error("ocmarket " + args.front() + " exited with " + std::to_string(status));
}

Json load_stats(const fs::path& dir) { return Json::parse(read_text(dir / "stats.json")); }

const Json& player_stats(const Json& doc, const std::string& strategy, std::size_t player) {
  for (const Json& s : doc.at("strategies")) {
    if (s.at("strategy") == strategy) return s.at("players").at(player);
  }
  throw std::runtime_error("strategy " + strategy + " missing from stats.json");
}

double field(const Json& doc, const std::string& strategy, std::size_t player, const char* key) {
  const Json& v = player_stats(doc, strategy, player).at(key);
  if (v.is_null()) return std::nan("");
  return v.get<double>();
}

std::vector<fs::path> dump_paths(const fs::path& dir) {
  const Manifest m = parse_manifest(read_text(dir / "manifest.json"));
  std::vector<fs::path> out;
  for (const std::string& d : m.dumps) out.push_back(fs::path(d).is_absolute() ? fs::path(d) : dir / d);
  return out;
}

class Suite {
 public:
  explicit Suite(fs::path work) : work_(std::move(work)) {}

  void run(int id, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
      body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("error: ") + e.what());
    }
    failures_ += o.pass ? 0 : 1;
    std::printf("criterion %2d %s: %s | %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
    std::fflush(stdout);
  }

  fs::path dir(const std::string& name) const { return work_ / name; }
  int failures() const { return failures_; }

 private:
  fs::path work_;
  int failures_ = 0;
};

// ---------------------------------------------------------------------------------------

struct SingleRun {
  fs::path solved, compared;
  double solve_seconds = 0, simulate_seconds = 0;
};

SingleRun run_single_base(const Suite& suite) {
  SingleRun r{suite.dir("single_solve"), suite.dir("single_compare")};
  fs::remove_all(r.solved);
  fs::remove_all(r.compared);
  run_or_throw({"solve-single", "--preset", "single_base", "--out-dir", r.solved.string()}, &r.solve_seconds);
  run_or_throw({"compare-naive", "--from-manifest", (r.solved / "manifest.json").string(), "--paths", "5000",
                "--out-dir", r.compared.string()},
               &r.simulate_seconds);
  return r;
}

void criterion_1(Outcome& o, const SingleRun& r) {
  const Json s = load_stats(r.compared);
  const double og = field(s, "only_generate", 0, "mean_pnl");
  const double opt = field(s, "optimal_single", 0, "mean_pnl");
  const double ct = field(s, "constant_trade", 0, "mean_pnl");
  const double half = field(s, "half_trade_half_generate", 0, "mean_pnl");
  const double opt_te = field(s, "optimal_single", 0, "te");
  const double ct_te = field(s, "constant_trade", 0, "te");
  const double half_te = field(s, "half_trade_half_generate", 0, "te");
  o.require(player_stats(s, "optimal_single", 0).at("samples") == 5000, "5000 paths");
  o.require(og == -12.5, "only_generate mean == -12.5 (got " + fmt(og, 6) + ")");
  o.require(opt >= kSingleMeanLo - kSingleTol && opt <= kSingleMeanHi + kSingleTol,
            "optimal mean in [-12.55, -12.35] (got " + fmt(opt) + ")");
  o.require(opt > ct && opt > half, "optimal mean above both trading baselines");
  o.require(opt_te > kSingleTeFloor, "optimal TE > -12.52 (got " + fmt(opt_te) + ")");
  o.require(opt_te > ct_te && opt_te > half_te, "optimal TE above both trading baselines");
  o.require(r.solve_seconds < kSolveSeconds, "solve < 60 s");
  o.require(r.simulate_seconds < kSimulateSeconds, "simulate < 60 s");
  o.note("means opt/ct/half/og = " + fmt(opt) + "/" + fmt(ct) + "/" + fmt(half) + "/" + fmt(og));
  o.note("TE opt/ct/half = " + fmt(opt_te) + "/" + fmt(ct_te) + "/" + fmt(half_te));
  o.note("solve " + fmt(r.solve_seconds, 1) + " s, simulate " + fmt(r.simulate_seconds, 1) + " s");
}

void criterion_2(Outcome& o, const SingleRun& r) {
  const Json s = load_stats(r.compared);
  const double gen = field(s, "optimal_single", 0, "mean_generated");
  o.require(gen >= kGeneratedLo && gen <= kGeneratedHi, "mean generated in [4.4, 5.0] (got " + fmt(gen) + ")");

  // Terminal inventory (before submission) needs the ledgers, so rerun in process.
  Config config;
  const SinglePlayerSolution sol = load_single(r.solved / "single_dump.bin", config);
  SimOptions opt;
  opt.paths = 5000;
  opt.seed = config.run.seed;
  opt.pnl_friction = config.run.pnl_friction;
  const auto res = run_simulation({Strategy::optimal(sol)}, {config.market, config.players, config.grid}, opt);
  double generated = 0, terminal = 0;
  for (const PathRecord& p : res[0].paths) {
    const PlayerLedger& l = p.ledgers[0];
    generated += l.generated(config.players[0].gen_lot);
    terminal += l.inventory(config.players[0].gen_lot) + l.submitted;
  }
  const double share = generated / terminal;
  o.require(res[0].stats[0].mean_generated == gen, "in-process rerun reproduces the CLI statistics");
  o.require(share >= kGeneratedShare, "generated share of terminal inventory >= 85% (got " + fmt(100 * share, 2) + "%)");
  o.note("mean generated " + fmt(gen) + ", share " + fmt(100 * share, 2) + "%");
}

void criterion_3(Outcome& o, const SingleRun& r) {
  Config config;
  const SinglePlayerSolution sol = load_single(r.solved / "single_dump.bin", config);
  const double R = config.players[0].requirement(0);
  std::size_t checked = 0, violations = 0;
  for (std::size_t k = 0; k < sol.decision.size(); ++k) {
    for (std::size_t i = 0; i < config.grid.inventory.count; ++i) {
      if (config.grid.inventory.node(i) < R - 1e-9) continue;
      for (std::size_t j = 0; j < config.grid.price.count; ++j) {
        ++checked;
        if (sol.decision[k](i, j) != 0.0) ++violations;
      }
    }
  }
  o.require(violations == 0, std::to_string(violations) + " generating nodes at x >= R");
  o.note(std::to_string(checked) + " nodes checked at x >= R over " + std::to_string(sol.decision.size()) +
         " slices");
}

struct TwoRun {
  fs::path dir;
  double seconds = 0;
  Json stats;
};

TwoRun run_two(const Suite& suite, const std::string& preset) {
  TwoRun r;
  r.dir = suite.dir(preset);
  fs::remove_all(r.dir);
  run_or_throw({"simulate", "--preset", preset, "--paths", "5000", "--path-summary", "0", "--out-dir",
                r.dir.string()},
               &r.seconds);
  r.stats = load_stats(r.dir);
  return r;
}

void criterion_4(Outcome& o, const TwoRun& r) {
  Config config;
  const MultiPeriodSolution sol = load_multi(dump_paths(r.dir), config);
  const TwoPlayerSolution& p = sol.periods.at(0);
  const std::size_t I = p.grid.inventory.count, J = p.grid.price.count;
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k <= p.grid.time.steps; ++k) {
    for (SurfaceRole role : {SurfaceRole::Value, SurfaceRole::GenProbability}) {
      const Slice a = p.slice(role, 0, k);
      const Slice b = p.slice(role, 1, k);
      for (std::size_t i1 = 0; i1 < I; ++i1) {
        for (std::size_t i2 = 0; i2 < I; ++i2) {
          for (std::size_t j = 0; j < J; ++j) {
            if (a(pair_cell(i1, i2, I), j) != b(pair_cell(i2, i1, I), j)) ++mismatches;
          }
        }
      }
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " asymmetric nodes in V or pi");
  for (std::size_t m = 0; m < 2; ++m) {
    const double mean = field(r.stats, "nash_two", m, "mean_pnl");
    const double te = field(r.stats, "nash_two", m, "te");
    const std::string who = "player " + std::to_string(m + 1);
    o.require(mean >= kHomogMeanLo - kHomogTol && mean <= kHomogMeanHi + kHomogTol,
              who + " mean in [-12.56, -12.24] (got " + fmt(mean) + ")");
    o.require(te > kHomogTeFloor, who + " TE > -12.52 (got " + fmt(te) + ")");
    o.note(who + " mean " + fmt(mean) + " TE " + fmt(te));
  }
  o.require(r.seconds < kTwoSeconds, "two-player run < 30 min");
  o.note("exact mirror symmetry over " + std::to_string(p.grid.time.steps + 1) + " slices, run " +
         fmt(r.seconds, 1) + " s");
}

void criterion_5(Outcome& o, const TwoRun& hetero, const Json& homog) {
  for (std::size_t m = 0; m < 2; ++m) {
    const double h = field(hetero.stats, "nash_two", m, "mean_pnl");
    const double base = field(homog, "nash_two", m, "mean_pnl");
    const std::string who = "player " + std::to_string(m + 1);
    o.require(h >= base - kHeteroSlack, who + " hetero mean >= homog mean - 0.01");
    o.note(who + " hetero " + fmt(h) + " vs homog " + fmt(base) + ", TE " +
           fmt(field(hetero.stats, "nash_two", m, "te")));
  }
}

void criterion_6(Outcome& o, const TwoRun& r) {
  for (std::size_t m = 0; m < 2; ++m) {
    const double mean = field(r.stats, "nash_two", m, "mean_pnl");
    const double te = field(r.stats, "nash_two", m, "te");
    const std::string who = "player " + std::to_string(m + 1);
    o.require(mean > kPeriodFloor, who + " mean > -25");
    o.require(std::abs(mean - kPeriodTarget) <= kPeriodTol, who + " mean within 0.15 of -24.89 (got " + fmt(mean) + ")");
    o.require(te > kPeriodFloor, who + " TE > -25 (got " + fmt(te) + ")");
    o.note(who + " mean " + fmt(mean) + " TE " + fmt(te));
  }
}

void criterion_7(Outcome& o) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(4, 60);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t J = size(rng);
    std::vector<double> a(J), b(J), c(J), rhs(J);
    for (std::size_t j = 0; j < J; ++j) {
      a[j] = u(rng);
      c[j] = u(rng);
      b[j] = (std::abs(a[j]) + std::abs(c[j]) + 0.1 + std::abs(u(rng))) * (u(rng) < 0 ? -1 : 1);
      rhs[j] = 10 * u(rng);
    }
    const std::vector<double> x = solve_tridiagonal(a, b, c, rhs);
    rhs.front() = rhs.back() = 0.0;
    const std::vector<double> ref = oracle::dense_solve(oracle::price_matrix(a, b, c), rhs);
    for (std::size_t j = 0; j < J; ++j) worst = std::max(worst, std::abs(x[j] - ref[j]));
  }
  o.require(worst <= kTridiagTol, "tridiagonal vs dense max |diff| <= 1e-10");
  o.note("tridiagonal vs dense max |diff| " + std::to_string(worst));

  double row_err = 0.0;
  for (const char* preset : {"single_base", "two_homog", "two_period"}) {
    const Config c = load_preset(preset);
    for (const GridSpec& g : period_grids(c.market, c.grid)) {
      for (std::size_t k = 1; k <= g.time.steps; ++k) {
        for (std::size_t j = 1; j + 1 < g.price.count; ++j) {
          const FdCoefficients f = fd_coefficients(k, j, c.market, g);
          row_err = std::max(row_err, std::abs(f.lower + f.diag + f.upper - 1.0));
        }
      }
    }
  }
  o.require(row_err <= kRowSumTol, "a + b + c = 1 on every (k, j)");
  o.note("row-sum max |err| " + std::to_string(row_err));

  Config c = load_preset("single_base", {{"market.sigma", "0"}, {"market.kappa", "1e9"}, {"players.0.gen_cost", "1e9"}});
  const SinglePlayerSolution sol = solve_single(c.market, c.players[0], c.grid);
  double frozen = 0.0;
  for (const Slice& v : sol.value) {
    for (std::size_t i = 0; i < c.grid.inventory.count; ++i) {
      const double g = penalty_value(c.grid.inventory.node(i), c.players[0].requirement(0), c.market.penalty);
      for (std::size_t j = 0; j < c.grid.price.count; ++j) frozen = std::max(frozen, std::abs(v(i, j) - g));
    }
  }
  o.require(frozen <= kFrozenTol, "frozen solve V = G within 1e-6");
  o.note("frozen solve max |V - G| " + std::to_string(frozen));
}

void criterion_8(Outcome& o) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> entry(-2, 2);
  std::size_t games = 0, equilibria = 0, bad_br = 0, off_lattice = 0, missed_components = 0, degenerate = 0;
  for (; games < 10000; ++games) {
    Game2x2 g;
    for (auto& row : g.a) for (double& v : row) v = entry(rng);
    for (auto& row : g.b) for (double& v : row) v = entry(rng);
    const EquilibriumSet set = enumerate_equilibria(g);
    degenerate += set.degenerate ? 1 : 0;
    const oracle::LatticeResult lat = oracle::lattice_equilibria(g.a, g.b, kLatticeEps, 1000);
    std::vector<bool> hit(lat.components, false);
    for (const MixedEquilibrium& e : set.profiles) {
      ++equilibria;
      if (deviation_gain(g, 0, e.gen_prob) > kBestResponseTol || deviation_gain(g, 1, e.gen_prob) > kBestResponseTol) {
        ++bad_br;
      }
      const auto pi = static_cast<std::size_t>(std::lround(e.gen_prob[0] * 1000));
      const auto qi = static_cast<std::size_t>(std::lround(e.gen_prob[1] * 1000));
      if (!lat.contains(pi, qi)) ++off_lattice;
      const long comp = lat.component_near(pi, qi);
      if (comp >= 0) hit[static_cast<std::size_t>(comp)] = true;
    }
    for (bool h : hit) missed_components += h ? 0 : 1;
    if (set.profiles.empty()) ++missed_components;
  }
  o.require(bad_br == 0, std::to_string(bad_br) + " equilibria fail the 1e-9 best-response check");
  o.require(off_lattice == 0, std::to_string(off_lattice) + " equilibria outside the lattice set");
  o.require(missed_components == 0, std::to_string(missed_components) + " lattice components without an equilibrium");
  o.note(std::to_string(games) + " games, " + std::to_string(equilibria) + " equilibria, " +
         std::to_string(degenerate) + " degenerate games");
}

void criterion_9(Outcome& o) {
  double worst = 0.0;
  std::size_t instances = 0;
  const auto tiny = [](std::size_t steps, double dx, std::size_t nodes, GradientScheme scheme) {
    GridSpec g;
    g.time = {0.0, 1.0 / 12, steps};
    g.inventory = {0.0, dx, nodes};
    g.price = {0.0, 0.75, 5};
    g.gradient = scheme;
    return g;
  };
  for (GradientScheme scheme : {GradientScheme::Upwind, GradientScheme::Central}) {
    for (std::size_t steps : {2u, 3u}) {
      // Single firm: the standard market on a coarse lattice.
      MarketParams m;
      PlayerSpec p;
      p.gen_lot = 1.0;
      p.gen_cost = 2.5;
      p.requirements = {3.0};
      const GridSpec g = tiny(steps, 1.0, 6, scheme);
      const SinglePlayerSolution sol = solve_single(m, p, g);
      const oracle::SingleResult ref = oracle::single_dp(m, p, g);
      for (std::size_t k = 0; k <= steps; ++k) {
        for (std::size_t i = 0; i < 6; ++i) {
          for (std::size_t j = 0; j < 5; ++j) worst = std::max(worst, std::abs(sol.value[k](i, j) - ref.value[k][i][j]));
        }
      }
      ++instances;

      // Two firms, homogeneous and heterogeneous.
      PlayerSpec a;
      a.gen_lot = 0.5;
      a.gen_cost = 1.25;
      a.requirements = {1.0};
      PlayerSpec b = a;
      b.gen_lot = 1.0;
      b.gen_cost = 3.0;
      for (const std::array<PlayerSpec, 2>& pl : {std::array<PlayerSpec, 2>{a, a}, std::array<PlayerSpec, 2>{a, b}}) {
        MarketParams m2;
        m2.kappa = 0.3;
        const GridSpec g2 = tiny(steps, 0.5, 5, scheme);
        const TwoPlayerSolution two = solve_two(m2, pl, g2);
        const oracle::TwoResult r2 = oracle::two_dp(m2, pl, g2);
        for (std::size_t k = 0; k <= steps; ++k) {
          for (std::size_t m = 0; m < 2; ++m) {
            const Slice v = two.slice(SurfaceRole::Value, m, k);
            const Slice pi = two.slice(SurfaceRole::GenProbability, m, k);
            for (std::size_t i1 = 0; i1 < 5; ++i1) {
              for (std::size_t i2 = 0; i2 < 5; ++i2) {
                for (std::size_t j = 0; j < 5; ++j) {
                  worst = std::max(worst, std::abs(v(pair_cell(i1, i2, 5), j) - r2.value[m][k][i1][i2][j]));
                  worst = std::max(worst, std::abs(pi(pair_cell(i1, i2, 5), j) - r2.prob[m][k][i1][i2][j]));
                }
              }
            }
          }
        }
        ++instances;
      }
    }
  }
  o.require(worst <= kOracleTol, "max |solver - oracle| <= 1e-6");
  o.note(std::to_string(instances) + " instances, max |diff| " + std::to_string(worst));
}

void criterion_10(Outcome& o, const Suite& suite, const SingleRun& single, const TwoRun& homog) {
  const auto replay = [&](const fs::path& source, const std::string& command, const std::string& name) {
    const fs::path out = suite.dir(name);
    fs::remove_all(out);
    run_or_throw({command, "--from-manifest", (source / "manifest.json").string(), "--out-dir", out.string()});
    return read_text(out / "stats.json");
  };
  const std::string first = read_text(single.compared / "stats.json");
  o.require(replay(single.compared, "compare-naive", "replay_single_a") == first, "single replay A identical");
  o.require(replay(single.compared, "compare-naive", "replay_single_b") == first, "single replay B identical");
  const std::string two = read_text(homog.dir / "stats.json");
  o.require(replay(homog.dir, "simulate", "replay_two") == two, "two-player replay identical");
  o.note("3 replays compared byte for byte");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "ocm_acceptance";
  fs::create_directories(work);
  Suite suite(work);
  std::printf("acceptance work directory: %s\n", work.string().c_str());

  SingleRun single;
  bool single_ok = true;
  try {
    single = run_single_base(suite);
  } catch (const std::exception& e) {
    single_ok = false;
    std::printf("single_base run failed: %s\n", e.what());
  }
  const auto need_single = [&](const std::function<void(Outcome&)>& body) {
    return [&, body](Outcome& o) {
      if (!single_ok) throw std::runtime_error("single_base run unavailable");
      body(o);
    };
  };
  suite.run(1, "single-firm optimal vs naive", need_single([&](Outcome& o) { criterion_1(o, single); }));
  suite.run(2, "generation dominance", need_single([&](Outcome& o) { criterion_2(o, single); }));
  suite.run(3, "no generation at or above the requirement", need_single([&](Outcome& o) { criterion_3(o, single); }));

  TwoRun homog;
  suite.run(4, "homogeneous two-firm symmetry", [&](Outcome& o) {
    homog = run_two(suite, "two_homog");
    criterion_4(o, homog);
  });
  suite.run(5, "heterogeneous ordering", [&](Outcome& o) {
    if (homog.stats.is_null()) throw std::runtime_error("two_homog run unavailable");
    const TwoRun hetero = run_two(suite, "two_hetero");
    criterion_5(o, hetero, homog.stats);
    for (const fs::path& d : dump_paths(hetero.dir)) fs::remove(d);
  });
  suite.run(6, "two-period bound", [&](Outcome& o) {
    const TwoRun period = run_two(suite, "two_period");
    criterion_6(o, period);
    for (const fs::path& d : dump_paths(period.dir)) fs::remove(d);
  });
  suite.run(7, "numerical core", criterion_7);
  suite.run(8, "game core against the lattice", criterion_8);
  suite.run(9, "tiny-instance DP equivalence", criterion_9);
  suite.run(10, "determinism of replays", [&](Outcome& o) {
    if (!single_ok || homog.stats.is_null()) throw std::runtime_error("earlier runs unavailable");
    criterion_10(o, suite, single, homog);
  });
  if (!homog.stats.is_null()) {
    for (const fs::path& d : dump_paths(homog.dir)) fs::remove(d);
  }

  std::printf("acceptance: %d of 10 criteria failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
