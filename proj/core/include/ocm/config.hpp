#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ocm/grid.hpp"
#include "ocm/market.hpp"

namespace ocm {

struct RunOptions {
  std::size_t paths = 5000;
  std::uint64_t seed = 12345;
  unsigned threads = 1;
  double te_level = 0.95;
  bool naive_impact = true;
  bool pnl_friction = false;
  std::size_t histogram_bins = 50;
  // Strategies for `simulate`; empty means every strategy that fits the player count.
  std::vector<std::string> strategies;
};

struct Config {
  std::string name = "custom";
  MarketParams market;
  std::vector<PlayerSpec> players{PlayerSpec{}};
  GridSpec grid;
  RunOptions run;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// One "dotted.key=value" assignment, e.g. {"market.sigma", "0.4"} or
// {"players.1.requirements", "5,5"}. List values are comma separated.
struct Override {
  std::string key;
  std::string value;
};

// Parses YAML (JSON is accepted as a YAML subset), applies the overrides in order and
// validates. Numbers may be written as fractions such as 1/12.
Config parse_config(const std::string& text, const std::vector<Override>& overrides = {});
Config load_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

std::vector<std::string> preset_names();
const std::string& preset_text(std::string_view name);  // throws ConfigError if unknown
Config load_preset(std::string_view name, const std::vector<Override>& overrides = {});

// Environment overrides: OCM_<KEY> with dots replaced by underscores and upper-cased,
// e.g. OCM_MARKET_SIGMA or OCM_PLAYERS_0_GEN_COST. `getenv` is injectable for tests.
std::vector<Override> env_overrides(
    std::size_t players,
    const std::function<const char*(const char*)>& getenv_fn = [](const char* n) {
      return std::getenv(n);
    });

// Every key understood by the loader for a configuration with `players` players.
std::vector<std::string> config_keys(std::size_t players);

// Canonical JSON (fixed key order, shortest round-trip doubles); parsing it back yields an
// identical Config.
std::string config_to_json(const Config& config, int indent = 2);

// FNV-1a of the compact canonical JSON.
std::uint64_t config_hash(const Config& config);

}  // namespace ocm
