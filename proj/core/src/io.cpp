#include "ocm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "ocm/error.hpp"
#include "ocm/slice_store.hpp"

#ifndef OCM_VERSION
#define OCM_VERSION "0.0.0"
#endif

namespace ocm {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json stats_to_json(const SimStats& s) {
  return {{"mean_pnl", number_or_null(s.mean_pnl)},
          {"te", s.te_available ? number_or_null(s.te) : Json(nullptr)},
          {"te_level", s.te_level},
          {"pnl_se", number_or_null(s.se)},
          {"mean_generated", number_or_null(s.mean_generated)},
          {"samples", s.samples}};
}

}  // namespace

const char* library_version() noexcept { return OCM_VERSION; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& out, std::size_t players) {
  out << (players == 2 ? "t,x1,x2,s,value\n" : "t,x,s,value\n");
}

void write_slice_csv(std::ostream& out, const GridSpec& grid, std::size_t players, double t,
                     const Slice& slice) {
  const std::size_t I = grid.inventory.count;
  const std::string ts = format_double(t);
  for (std::size_t cell = 0; cell < slice.cells(); ++cell) {
    std::string prefix = ts + ",";
    if (players == 2) {
      prefix += format_double(grid.inventory.node(cell / I)) + "," +
                format_double(grid.inventory.node(cell % I)) + ",";
    } else {
      prefix += format_double(grid.inventory.node(cell)) + ",";
    }
    for (std::size_t j = 0; j < slice.prices(); ++j) {
      out << prefix << format_double(grid.price.node(j)) << ',' << format_double(slice(cell, j)) << '\n';
    }
  }
}

void write_pnl_csv(const std::filesystem::path& path, const std::vector<StrategyResult>& results,
                   const std::vector<PlayerSpec>& players) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "strategy,path,player,pnl,generated,trading_cost,friction_cost,generation_cost,penalty,"
         "final_inventory,final_price\n";
  for (const StrategyResult& r : results) {
    for (const PathRecord& p : r.paths) {
      for (std::size_t m = 0; m < p.ledgers.size(); ++m) {
        const PlayerLedger& led = p.ledgers[m];
        const double lot = players.at(m).gen_lot;
        out << to_string(r.kind) << ',' << p.index << ',' << m + 1 << ',' << format_double(led.pnl())
            << ',' << format_double(led.generated(lot)) << ',' << format_double(led.trading_cost)
            << ',' << format_double(led.friction_cost) << ',' << format_double(led.generation_cost)
            << ',' << format_double(led.penalty_total()) << ',' << format_double(led.inventory(lot))
            << ',' << format_double(p.final_price) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed on " + path.string());
}

void write_path_summary_csv(const std::filesystem::path& path,
                            const std::vector<StrategyResult>& results, std::size_t max_paths) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "strategy,path,step,t,s,player,x,rate,generate\n";
  for (const StrategyResult& r : results) {
    const std::size_t n = std::min(max_paths, r.paths.size());
    for (std::size_t p = 0; p < n; ++p) {
      const PathRecord& rec = r.paths[p];
      for (std::size_t k = 0; k < rec.trace.t.size(); ++k) {
        for (std::size_t m = 0; m < rec.ledgers.size(); ++m) {
          out << to_string(r.kind) << ',' << rec.index << ',' << k << ',' << format_double(rec.trace.t[k])
              << ',' << format_double(rec.trace.s[k]) << ',' << m + 1 << ','
              << format_double(rec.trace.x[k][m]) << ',' << format_double(rec.trace.rate[k][m]) << ','
              << static_cast<int>(rec.trace.generate[k][m]) << '\n';
        }
      }
    }
  }
  if (!out) throw IoError("write failed on " + path.string());
}

std::string stats_json(const std::vector<StrategyResult>& results) {
  Json doc;
  doc["strategies"] = Json::array();
  for (const StrategyResult& r : results) {
    Json players = Json::array();
    for (std::size_t m = 0; m < r.stats.size(); ++m) {
      Json s = stats_to_json(r.stats[m]);
      s["player"] = m + 1;
      players.push_back(std::move(s));
    }
    doc["strategies"].push_back({{"strategy", to_string(r.kind)}, {"players", std::move(players)}});
  }
  return doc.dump(2) + "\n";
}

std::string histogram_json(const std::vector<StrategyResult>& results, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const StrategyResult& r : results) {
    for (const PathRecord& p : r.paths) {
      for (const PlayerLedger& led : p.ledgers) {
        lo = std::min(lo, led.pnl());
        hi = std::max(hi, led.pnl());
      }
    }
  }
  Json doc;
  if (!(lo <= hi)) {
    doc["edges"] = Json::array();
    doc["histograms"] = Json::array();
    return doc.dump(2) + "\n";
  }
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  Json edges = Json::array();
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(b == bins ? hi : lo + static_cast<double>(b) * width);
  doc["edges"] = edges;
  doc["histograms"] = Json::array();
  for (const StrategyResult& r : results) {
    const std::size_t P = r.stats.size();
    for (std::size_t m = 0; m < P; ++m) {
      std::vector<std::size_t> counts(bins, 0);
      for (const PathRecord& p : r.paths) {
        const double v = p.ledgers[m].pnl();
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        counts[std::min(b, bins - 1)]++;
      }
      doc["histograms"].push_back({{"strategy", to_string(r.kind)}, {"player", m + 1}, {"counts", counts}});
    }
  }
  return doc.dump(2) + "\n";
}

std::string manifest_json(const Manifest& m) {
  Json doc;
  doc["command"] = m.command;
  doc["config"] = Json::parse(m.config_json);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  doc["config_hash"] = hash;
  doc["seed"] = m.seed;
  doc["versions"] = {{"ocmarket", library_version()}, {"compiler", __VERSION__}};
  doc["wall_seconds"] = m.wall_seconds;
  doc["outputs"] = m.outputs;
  doc["dumps"] = m.dumps;
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("manifest", std::string("cannot parse: ") + e.what());
  }
  Manifest m;
  try {
    m.command = doc.at("command").get<std::string>();
    m.config_json = doc.at("config").dump();
    m.config_hash = std::stoull(doc.at("config_hash").get<std::string>(), nullptr, 16);
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.wall_seconds = doc.value("wall_seconds", 0.0);
    m.outputs = doc.value("outputs", std::vector<std::string>{});
    m.dumps = doc.value("dumps", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw ConfigError("manifest", std::string("missing or invalid entry: ") + e.what());
  }
  return m;
}

std::string error_json(const std::exception& error) {
  Json body{{"kind", "internal"}, {"field", nullptr}, {"message", error.what()}};
  if (const auto* e = dynamic_cast<const Error*>(&error)) body["kind"] = e->kind();
  if (const auto* e = dynamic_cast<const ConfigError*>(&error)) {
    if (!e->field().empty()) body["field"] = e->field();
  }
  return Json{{"error", body}}.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed on " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_single(const std::filesystem::path& path, const SinglePlayerSolution& sol,
                 const Config& config) {
  const StoreLayout layout{sol.grid.time.steps, 1, sol.grid.inventory.count, sol.grid.price.count,
                           {SurfaceRole::Value, SurfaceRole::Continuation, SurfaceRole::TradeRate,
                            SurfaceRole::Decision}};
  auto store = FileSliceStore::create(path, layout, config_to_json(config, -1));
  for (std::size_t k = 0; k <= sol.grid.time.steps; ++k) {
    store->write(k, SurfaceRole::Value, 0, sol.value[k]);
    store->write(k, SurfaceRole::Continuation, 0, sol.continuation[k]);
    store->write(k, SurfaceRole::TradeRate, 0, sol.trade_rate[k]);
    store->write(k, SurfaceRole::Decision, 0, sol.decision[k]);
  }
  store->finalize();
}

SinglePlayerSolution load_single(const std::filesystem::path& path, Config& config) {
  const auto store = FileSliceStore::open(path);
  config = parse_config(store->metadata());
  if (config.players.size() != 1) throw IoError(path.string() + " is not a single-player dump");
  SinglePlayerSolution sol{config.market, config.players[0], config.grid, {}, {}, {}, {}};
  const StoreLayout& layout = store->layout();
  if (layout.steps != config.grid.time.steps || layout.cells != config.grid.inventory.count ||
      layout.prices != config.grid.price.count || layout.players != 1) {
    throw IoError(path.string() + ": layout does not match its configuration");
  }
  for (std::size_t k = 0; k <= layout.steps; ++k) {
    sol.value.push_back(store->read(k, SurfaceRole::Value, 0));
    sol.continuation.push_back(store->read(k, SurfaceRole::Continuation, 0));
    sol.trade_rate.push_back(store->read(k, SurfaceRole::TradeRate, 0));
    sol.decision.push_back(store->read(k, SurfaceRole::Decision, 0));
  }
  return sol;
}

MultiPeriodSolution load_multi(const std::vector<std::filesystem::path>& paths, Config& config) {
  if (paths.empty()) throw IoError("no two-player dumps given");
  MultiPeriodSolution sol;
  std::vector<GridSpec> grids;
  for (std::size_t l = 0; l < paths.size(); ++l) {
    std::shared_ptr<FileSliceStore> store = FileSliceStore::open(paths[l]);
    if (l == 0) {
      config = parse_config(store->metadata());
      if (config.players.size() != 2) throw IoError(paths[l].string() + " is not a two-player dump");
      grids = period_grids(config.market, config.grid);
      if (grids.size() != paths.size()) {
        throw IoError("expected " + std::to_string(grids.size()) + " period dumps, got " +
                      std::to_string(paths.size()));
      }
    } else if (store->metadata() != config_to_json(config, -1)) {
      throw IoError(paths[l].string() + " belongs to a different configuration");
    }
    if (store->layout() != two_player_layout(grids[l], store->layout().roles)) {
      throw IoError(paths[l].string() + ": layout does not match its configuration");
    }
    TwoPlayerSolution p;
    p.market = config.market;
    p.players = {config.players[0], config.players[1]};
    p.grid = grids[l];
    p.period = l;
    if (store->layout().has(SurfaceRole::Value)) {
      p.initial_value = {store->read(0, SurfaceRole::Value, 0), store->read(0, SurfaceRole::Value, 1)};
    }
    p.store = std::move(store);
    sol.periods.push_back(std::move(p));
  }
  return sol;
}

}  // namespace ocm
