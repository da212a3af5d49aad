#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ocm/config.hpp"
#include "ocm/error.hpp"
#include "ocm/io.hpp"
#include "ocm/multi_period.hpp"
#include "ocm/simulator.hpp"
#include "ocm/single_player.hpp"
#include "ocm/slice_store.hpp"

namespace ocm::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string preset;
  std::string manifest_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<unsigned> threads;
  std::optional<double> te_level;
  std::string export_slices;
  bool all_surfaces = false;
  std::size_t path_summary = 10;
};

struct Context {
  Options opt;
  Config config;
  fs::path out;
  fs::path replay_dir;             // directory of the manifest being replayed
  std::vector<std::string> dumps;  // dumps listed by that manifest
  Manifest manifest;
};

Override parse_set(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected key=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Config resolve_config(Context& ctx) {
  const Options& o = ctx.opt;
  const int sources = !o.config_path.empty() + !o.preset.empty() + !o.manifest_path.empty();
  if (sources > 1) throw ConfigError("", "use only one of --config, --preset and --from-manifest");

  std::string text;
  if (!o.manifest_path.empty()) {
    const Manifest m = parse_manifest(read_text(o.manifest_path));
    text = m.config_json;
    ctx.replay_dir = fs::path(o.manifest_path).parent_path();
    ctx.dumps = m.dumps;
  } else if (!o.preset.empty()) {
    text = preset_text(o.preset);
  } else if (!o.config_path.empty()) {
    text = read_text(o.config_path);
  } else {
    text = preset_text("single_base");
  }

  // Environment first, then command-line assignments, then dedicated flags.
  const Config base = parse_config(text);
  std::vector<Override> overrides = env_overrides(base.players.size());
  for (const std::string& s : o.sets) overrides.push_back(parse_set(s));
  if (o.seed) overrides.push_back({"run.seed", std::to_string(*o.seed)});
  if (o.paths) overrides.push_back({"run.paths", std::to_string(*o.paths)});
  if (o.threads) overrides.push_back({"run.threads", std::to_string(*o.threads)});
  if (o.te_level) overrides.push_back({"run.te_level", format_double(*o.te_level)});
  return parse_config(text, overrides);
}

std::vector<std::size_t> export_steps(const Options& o, std::size_t steps) {
  std::vector<std::size_t> ks;
  if (o.all_surfaces || o.export_slices == "all") {
    for (std::size_t k = 0; k <= steps; ++k) ks.push_back(k);
    return ks;
  }
  if (o.export_slices.empty()) {
    for (std::size_t q = 0; q < 4; ++q) ks.push_back(q * steps / 4);
    ks.push_back(steps - 1);
  } else {
    std::stringstream ss(o.export_slices);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t k = 0;
      try {
        k = std::stoul(item);
      } catch (const std::exception&) {
        throw ConfigError("--export-slices", "expected comma-separated step indices or 'all'");
      }
      if (k > steps) throw ConfigError("--export-slices", "step " + item + " exceeds the grid");
      ks.push_back(k);
    }
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void export_single(Context& ctx, const SinglePlayerSolution& sol) {
  const std::vector<std::size_t> ks = export_steps(ctx.opt, sol.grid.time.steps);
  const std::pair<const char*, const std::vector<Slice>*> surfaces[] = {
      {"value.csv", &sol.value}, {"decision.csv", &sol.decision}, {"trade_rate.csv", &sol.trade_rate}};
  for (const auto& [name, history] : surfaces) {
    std::ofstream out(ctx.out / name);
    if (!out) throw IoError(std::string("cannot write ") + name);
    write_csv_header(out, 1);
    for (std::size_t k : ks) write_slice_csv(out, sol.grid, 1, sol.grid.time.node(k), (*history)[k]);
    ctx.manifest.outputs.push_back(name);
  }
}

void export_two(Context& ctx, const MultiPeriodSolution& sol) {
  const bool tagged = sol.periods.size() > 1;
  for (const TwoPlayerSolution& p : sol.periods) {
    const std::vector<std::size_t> ks = export_steps(ctx.opt, p.grid.time.steps);
    for (SurfaceRole role : {SurfaceRole::GenProbability, SurfaceRole::TradeRate, SurfaceRole::Value}) {
      for (std::size_t m = 0; m < 2; ++m) {
        std::string name = std::string(to_string(role)) + "_p" + std::to_string(m + 1);
        if (tagged) name += "_period" + std::to_string(p.period + 1);
        name += ".csv";
        std::ofstream out(ctx.out / name);
        if (!out) throw IoError("cannot write " + name);
        write_csv_header(out, 2);
        for (std::size_t k : ks) write_slice_csv(out, p.grid, 2, p.grid.time.node(k), p.slice(role, m, k));
        ctx.manifest.outputs.push_back(name);
      }
    }
  }
}

// Dumps listed by a replayed manifest are relative to its directory unless absolute.
fs::path resolve_dump(const Context& ctx, const std::string& entry) {
  const fs::path p(entry);
  return p.is_absolute() ? p : ctx.replay_dir / p;
}

// Manifest entry for a reused dump: its name when it already sits in the output
// directory, else its absolute path.
std::string dump_entry(const Context& ctx, const fs::path& source) {
  std::error_code ec;
  if (fs::equivalent(source, ctx.out / source.filename(), ec)) return source.filename().string();
  return fs::absolute(source).string();
}

const std::string* find_dump(const Context& ctx, const std::string& name) {
  for (const std::string& d : ctx.dumps) {
    if (fs::path(d).filename() == name) return &d;
  }
  return nullptr;
}

bool same_problem(Config stored, const Config& current) {
  stored.run = current.run;
  return config_to_json(stored, -1) == config_to_json(current, -1);
}

SinglePlayerSolution obtain_single(Context& ctx) {
  if (const std::string* d = find_dump(ctx, "single_dump.bin")) {
    const fs::path source = resolve_dump(ctx, *d);
    Config stored;
    SinglePlayerSolution sol = load_single(source, stored);
    if (same_problem(stored, ctx.config)) {
      ctx.manifest.dumps.push_back(dump_entry(ctx, source));
      return sol;
    }
  }
  SinglePlayerSolution sol =
      solve_single(ctx.config.market, ctx.config.players.at(0), ctx.config.grid, {ctx.config.run.threads});
  save_single(ctx.out / "single_dump.bin", sol, ctx.config);
  ctx.manifest.dumps.push_back("single_dump.bin");
  return sol;
}

std::string two_dump_name(std::size_t period) { return "two_dump_period" + std::to_string(period + 1) + ".bin"; }

MultiPeriodSolution obtain_two(Context& ctx) {
  const std::size_t L = ctx.config.market.periods();
  std::vector<fs::path> existing;
  for (std::size_t l = 0; l < L; ++l) {
    if (const std::string* d = find_dump(ctx, two_dump_name(l))) existing.push_back(resolve_dump(ctx, *d));
  }
  if (existing.size() == L) {
    Config stored;
    MultiPeriodSolution sol = load_multi(existing, stored);
    if (same_problem(stored, ctx.config)) {
      for (const fs::path& e : existing) ctx.manifest.dumps.push_back(dump_entry(ctx, e));
      return sol;
    }
  }
  const Config& c = ctx.config;
  std::vector<std::shared_ptr<FileSliceStore>> files;
  const std::string meta = config_to_json(c, -1);
  const StoreFactory factory = [&](std::size_t period, const StoreLayout& layout) {
    auto store = std::shared_ptr<FileSliceStore>(
        FileSliceStore::create(ctx.out / two_dump_name(period), layout, meta));
    files.push_back(store);
    return std::static_pointer_cast<SliceStore>(store);
  };
  MultiPeriodSolution sol =
      solve_multi(c.market, {c.players.at(0), c.players.at(1)}, c.grid, factory, {c.run.threads});
  for (const auto& f : files) f->finalize();
  for (std::size_t l = 0; l < L; ++l) ctx.manifest.dumps.push_back(two_dump_name(l));
  return sol;
}

void write_simulation(Context& ctx, const std::vector<StrategyResult>& results,
                      const std::vector<PlayerSpec>& players) {
  write_text(ctx.out / "stats.json", stats_json(results));
  write_pnl_csv(ctx.out / "pnl.csv", results, players);
  write_text(ctx.out / "histogram.json", histogram_json(results, ctx.config.run.histogram_bins));
  ctx.manifest.outputs.insert(ctx.manifest.outputs.end(), {"stats.json", "pnl.csv", "histogram.json"});
  if (ctx.opt.path_summary > 0) {
    write_path_summary_csv(ctx.out / "path_summary.csv", results, ctx.opt.path_summary);
    ctx.manifest.outputs.push_back("path_summary.csv");
  }
}

SimOptions sim_options(const Context& ctx) {
  const RunOptions& r = ctx.config.run;
  SimOptions s;
  s.paths = r.paths;
  s.seed = r.seed;
  s.te_level = r.te_level;
  s.threads = r.threads;
  s.naive_impact = r.naive_impact;
  s.pnl_friction = r.pnl_friction;
  s.record_steps = ctx.opt.path_summary > 0;
  return s;
}

void print_stats(const std::vector<StrategyResult>& results) {
  std::printf("%-26s %6s %12s %12s %12s %10s\n", "strategy", "player", "mean_pnl", "te", "pnl_se",
              "generated");
  for (const StrategyResult& r : results) {
    for (std::size_t m = 0; m < r.stats.size(); ++m) {
      const SimStats& s = r.stats[m];
      std::printf("%-26s %6zu %12.5f %12.5f %12.5f %10.4f\n", to_string(r.kind), m + 1, s.mean_pnl,
                  s.te_available ? s.te : std::nan(""), s.se, s.mean_generated);
    }
  }
}

void require_players(const Config& c, std::size_t n, const std::string& command) {
  if (c.players.size() != n) {
    throw ConfigError("players", command + " needs " + std::to_string(n) + " player(s)");
  }
}

void run_command(Context& ctx) {
  const std::string& cmd = ctx.opt.command;
  Config& c = ctx.config;
  if (cmd == "solve-single") {
    require_players(c, 1, cmd);
    export_single(ctx, obtain_single(ctx));
  } else if (cmd == "solve-two" || cmd == "solve-multi") {
    require_players(c, 2, cmd);
    if (cmd == "solve-two" && c.market.periods() != 1) {
      throw ConfigError("market.compliance_dates", "solve-two needs one compliance date; use solve-multi");
    }
    export_two(ctx, obtain_two(ctx));
  } else if (cmd == "simulate" || cmd == "compare-naive") {
    std::vector<StrategyKind> kinds;
    if (cmd == "compare-naive") {
      require_players(c, 1, cmd);
      kinds = {StrategyKind::OptimalSingle, StrategyKind::ConstantTrade,
               StrategyKind::HalfTradeHalfGenerate, StrategyKind::OnlyGenerate};
    } else if (!c.run.strategies.empty()) {
      for (const std::string& s : c.run.strategies) kinds.push_back(strategy_from_string(s));
    } else {
      kinds = {c.players.size() == 2 ? StrategyKind::NashTwo : StrategyKind::OptimalSingle};
    }
    std::optional<SinglePlayerSolution> single;
    std::optional<MultiPeriodSolution> game;
    std::vector<Strategy> strategies;
    for (StrategyKind k : kinds) {
      if (k == StrategyKind::NashTwo) {
        require_players(c, 2, "nash_two");
        if (!game) game = obtain_two(ctx);
        strategies.push_back(Strategy::nash(*game));
      } else if (k == StrategyKind::OptimalSingle) {
        require_players(c, 1, "optimal_single");
        if (!single) single = obtain_single(ctx);
        strategies.push_back(Strategy::optimal(*single));
      } else {
        strategies.push_back(Strategy::naive(k));
      }
    }
    const std::vector<StrategyResult> results =
        run_simulation(strategies, {c.market, c.players, c.grid}, sim_options(ctx));
    write_simulation(ctx, results, c.players);
    print_stats(results);
  } else {
    throw ConfigError("command", "unknown command '" + cmd + "'");
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  Options opt;
  CLI::App app{"Offset-credit market solver and simulator", "ocmarket"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  const std::pair<const char*, const char*> commands[] = {
      {"solve-single", "Single-firm value, decision region and trade rates"},
      {"solve-two", "Two-firm Nash equilibrium surfaces for one compliance date"},
      {"solve-multi", "Two-firm surfaces chained across compliance dates"},
      {"simulate", "Monte Carlo evaluation of the configured strategies"},
      {"compare-naive", "Optimal single-firm policy against the three naive strategies"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "YAML or JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--preset", opt.preset, "Built-in preset")->check(CLI::IsMember(preset_names()));
    sub->add_option("--from-manifest", opt.manifest_path, "Replay the configuration (and reuse dumps) of a manifest")
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set", opt.sets, "Override a configuration key, e.g. market.sigma=0.4");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--paths", opt.paths, "Number of Monte Carlo paths");
    sub->add_option("--threads", opt.threads, "Worker threads");
    sub->add_option("--te-level", opt.te_level, "Tail-expectation confidence level");
    sub->add_option("--export-slices", opt.export_slices, "Time steps to export as CSV (comma list or 'all')");
    sub->add_flag("--surfaces", opt.all_surfaces, "Export every time slice");
    sub->add_option("--path-summary", opt.path_summary, "Paths per strategy in path_summary.csv (0 disables)")
        ->capture_default_str();
    sub->callback([&opt, name = std::string(name)] { opt.command = name; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Context ctx;
  ctx.opt = opt;
  ctx.out = opt.out_dir;
  const auto started = std::chrono::steady_clock::now();
  try {
    fs::create_directories(ctx.out);
    ctx.config = resolve_config(ctx);
    ctx.manifest.command = opt.command;
    ctx.manifest.config_json = config_to_json(ctx.config);
    ctx.manifest.config_hash = config_hash(ctx.config);
    ctx.manifest.seed = ctx.config.run.seed;
    run_command(ctx);
    ctx.manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ctx.manifest.outputs.push_back("manifest.json");
    write_text(ctx.out / "manifest.json", manifest_json(ctx.manifest));
    fs::remove(ctx.out / "error.json");
    return 0;
  } catch (const std::exception& e) {
    const std::string doc = error_json(e);
    std::cerr << doc;
    std::error_code ec;
    if (fs::is_directory(ctx.out, ec)) {
      std::ofstream(ctx.out / "error.json") << doc;
    }
    return dynamic_cast<const ConfigError*>(&e) ? 2 : 1;
  }
}

}  // namespace ocm::cli
