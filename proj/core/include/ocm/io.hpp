#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ocm/config.hpp"
#include "ocm/multi_period.hpp"
#include "ocm/simulator.hpp"
#include "ocm/single_player.hpp"

namespace ocm {

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

// Rows "t,x,s,value" (one player) or "t,x1,x2,s,value" (two players) for one time slice.
void write_slice_csv(std::ostream& out, const GridSpec& grid, std::size_t players, double t,
                     const Slice& slice);
void write_csv_header(std::ostream& out, std::size_t players);

// One row per (strategy, path, player):
// strategy,path,player,pnl,generated,trading_cost,friction_cost,generation_cost,penalty,
// final_inventory,final_price
void write_pnl_csv(const std::filesystem::path& path, const std::vector<StrategyResult>& results,
                   const std::vector<PlayerSpec>& players);

// Per-step path summary over the first `max_paths` paths of each strategy; requires
// recorded traces. Columns: strategy,path,step,t,s,player,x,rate,generate
void write_path_summary_csv(const std::filesystem::path& path,
                            const std::vector<StrategyResult>& results, std::size_t max_paths);

// Deterministic statistics document (no timings).
std::string stats_json(const std::vector<StrategyResult>& results);

// Equal-width PnL histogram per strategy and player over the pooled sample range.
std::string histogram_json(const std::vector<StrategyResult>& results, std::size_t bins);

struct Manifest {
  std::string command;
  std::string config_json;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;  // file names relative to the output directory
  std::vector<std::string> dumps;    // surface dumps a replay may reuse
};

std::string manifest_json(const Manifest& manifest);
Manifest parse_manifest(const std::string& text);

// {"error": {"kind": ..., "field": ..., "message": ...}}
std::string error_json(const std::exception& error);

// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Full single-player histories with the configuration as metadata.
void save_single(const std::filesystem::path& path, const SinglePlayerSolution& solution,
                 const Config& config);
// Restores a dump; `config` receives the stored configuration.
SinglePlayerSolution load_single(const std::filesystem::path& path, Config& config);

// Reattaches per-period dumps written by a two-player solve (finalized FileSliceStores).
MultiPeriodSolution load_multi(const std::vector<std::filesystem::path>& paths, Config& config);

const char* library_version() noexcept;

}  // namespace ocm
