#include "ocm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "ocm/error.hpp"
#include "ocm/multi_period.hpp"

namespace ocm {

namespace {

using Json = nlohmann::ordered_json;

const std::map<std::string, std::vector<std::string>, std::less<>> kSectionKeys{
    {"market", {"horizon", "sigma", "kappa", "eta", "penalty", "initial_price", "compliance_dates"}},
    {"players", {"gen_lot", "gen_cost", "requirements"}},
    {"grid", {"time_steps", "x_min", "x_max", "dx", "s_min", "s_max", "ds", "gradient"}},
    {"run",
     {"paths", "seed", "threads", "te_level", "naive_impact", "pnl_friction", "histogram_bins",
      "strategies"}},
};

const std::vector<std::string> kListKeys{"compliance_dates", "requirements", "strategies"};

bool is_list_key(std::string_view key) {
  return std::find(kListKeys.begin(), kListKeys.end(), key) != kListKeys.end();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_plain_double(std::string_view text, const std::string& field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError(field, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

// Accepts plain numbers and fractions a/b.
double parse_number(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain_double(text, field);
  const double num = parse_plain_double(trim(std::string_view(text).substr(0, slash)), field);
  const double den = parse_plain_double(trim(std::string_view(text).substr(slash + 1)), field);
  if (den == 0.0) throw ConfigError(field, "division by zero in '" + text + "'");
  return num / den;
}

std::uint64_t parse_unsigned(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& raw, const std::string& field) {
  std::string text = trim(raw);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(field, "expected a boolean, got '" + raw + "'");
}

std::string scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, "expected a scalar value");
  return node.Scalar();
}

std::vector<std::string> scalar_list(const YAML::Node& node, const std::string& field) {
  std::vector<std::string> out;
  if (node.IsScalar()) {
    out.push_back(node.Scalar());
    return out;
  }
  if (!node.IsSequence()) throw ConfigError(field, "expected a list");
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(scalar(node[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> number_list(const YAML::Node& node, const std::string& field) {
  std::vector<double> out;
  const auto items = scalar_list(node, field);
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back(parse_number(items[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void reject_unknown(const YAML::Node& map, const std::vector<std::string>& known,
                    const std::string& prefix) {
  if (!map.IsMap()) throw ConfigError(prefix, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }
}

YAML::Node list_node(const std::string& value) {
  YAML::Node seq(YAML::NodeType::Sequence);
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) seq.push_back(trim(item));
  return seq;
}

void apply_override(YAML::Node& root, const Override& o) {
  std::vector<std::string> parts;
  std::stringstream ss(o.key);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  const std::string& leaf = parts.back();
  const YAML::Node value = is_list_key(leaf) ? list_node(o.value) : YAML::Node(o.value);
  if (parts.size() == 1 && leaf == "name") {
    root["name"] = o.value;
  } else if (parts.size() == 2 && kSectionKeys.count(parts[0]) && parts[0] != "players") {
    const auto& keys = kSectionKeys.find(parts[0])->second;
    if (std::find(keys.begin(), keys.end(), leaf) == keys.end()) {
      throw ConfigError(o.key, "unknown override key");
    }
    root[parts[0]][leaf] = value;
  } else if (parts.size() == 3 && parts[0] == "players") {
    const auto& keys = kSectionKeys.find("players")->second;
    if (std::find(keys.begin(), keys.end(), leaf) == keys.end()) {
      throw ConfigError(o.key, "unknown override key");
    }
    const std::size_t index = parse_unsigned(parts[1], o.key);
    YAML::Node players = root["players"];
    if (!players.IsDefined() || players.IsNull()) {
      players = YAML::Node(YAML::NodeType::Sequence);
      root["players"] = players;
    }
    if (!players.IsSequence() || index > players.size()) {
      throw ConfigError(o.key, "player index out of range");
    }
    if (index == players.size()) players.push_back(YAML::Node(YAML::NodeType::Map));
    YAML::Node player = players[index];
    player[leaf] = value;
  } else {
    throw ConfigError(o.key, "unknown override key");
  }
}

std::size_t axis_count(double lo, double hi, double step, const char* field) {
  if (!(step > 0.0)) throw ConfigError(std::string(field), "step must be > 0");
  if (!(hi > lo)) throw ConfigError(std::string(field), "upper bound must exceed lower bound");
  return lattice_steps(hi - lo, step, field) + 1;
}

Config from_yaml(YAML::Node root) {
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  reject_unknown(root, {"name", "market", "players", "grid", "run"}, "");
  Config c;
  if (root["name"]) c.name = scalar(root["name"], "name");

  if (const YAML::Node m = root["market"]) {
    reject_unknown(m, kSectionKeys.at("market"), "market");
    const auto num = [&](const char* key, double& out) {
      if (m[key]) out = parse_number(scalar(m[key], std::string("market.") + key), std::string("market.") + key);
    };
    num("horizon", c.market.horizon);
    num("sigma", c.market.sigma);
    num("kappa", c.market.kappa);
    num("eta", c.market.eta);
    num("penalty", c.market.penalty);
    num("initial_price", c.market.initial_price);
    if (m["compliance_dates"]) {
      c.market.compliance_dates = number_list(m["compliance_dates"], "market.compliance_dates");
    } else {
      c.market.compliance_dates = {c.market.horizon};
    }
  }
  const std::size_t L = c.market.compliance_dates.size();

  if (const YAML::Node ps = root["players"]) {
    if (!ps.IsSequence()) throw ConfigError("players", "expected a list of players");
    c.players.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string prefix = "players." + std::to_string(i);
      reject_unknown(ps[i], kSectionKeys.at("players"), prefix);
      PlayerSpec p;
      if (ps[i]["gen_lot"]) p.gen_lot = parse_number(scalar(ps[i]["gen_lot"], prefix + ".gen_lot"), prefix + ".gen_lot");
      if (ps[i]["gen_cost"]) p.gen_cost = parse_number(scalar(ps[i]["gen_cost"], prefix + ".gen_cost"), prefix + ".gen_cost");
      if (ps[i]["requirements"]) {
        p.requirements = number_list(ps[i]["requirements"], prefix + ".requirements");
      } else {
        p.requirements.assign(L, 5.0);
      }
      c.players.push_back(p);
    }
  } else {
    c.players.front().requirements.assign(L, 5.0);
  }

  double x_min = 0.0, x_max = 7.5, dx = 0.05, s_min = 0.0, s_max = 3.0, ds = 0.05;
  std::size_t steps = 100;
  if (const YAML::Node g = root["grid"]) {
    reject_unknown(g, kSectionKeys.at("grid"), "grid");
    const auto num = [&](const char* key, double& out) {
      if (g[key]) out = parse_number(scalar(g[key], std::string("grid.") + key), std::string("grid.") + key);
    };
    num("x_min", x_min);
    num("x_max", x_max);
    num("dx", dx);
    num("s_min", s_min);
    num("s_max", s_max);
    num("ds", ds);
    if (g["time_steps"]) steps = parse_unsigned(scalar(g["time_steps"], "grid.time_steps"), "grid.time_steps");
    if (g["gradient"]) c.grid.gradient = gradient_scheme_from_string(scalar(g["gradient"], "grid.gradient"));
  }
  if (s_min != 0.0) throw ConfigError("grid.s_min", "price axis must start at 0");
  c.grid.time = {0.0, c.market.horizon, steps};
  c.grid.inventory = {x_min, dx, axis_count(x_min, x_max, dx, "grid.x_max")};
  c.grid.price = {s_min, ds, axis_count(s_min, s_max, ds, "grid.s_max")};

  if (const YAML::Node r = root["run"]) {
    reject_unknown(r, kSectionKeys.at("run"), "run");
    if (r["paths"]) c.run.paths = parse_unsigned(scalar(r["paths"], "run.paths"), "run.paths");
    if (r["seed"]) c.run.seed = parse_unsigned(scalar(r["seed"], "run.seed"), "run.seed");
    if (r["threads"]) {
      c.run.threads = static_cast<unsigned>(parse_unsigned(scalar(r["threads"], "run.threads"), "run.threads"));
    }
    if (r["te_level"]) c.run.te_level = parse_number(scalar(r["te_level"], "run.te_level"), "run.te_level");
    if (r["naive_impact"]) c.run.naive_impact = parse_bool(scalar(r["naive_impact"], "run.naive_impact"), "run.naive_impact");
    if (r["pnl_friction"]) {
      c.run.pnl_friction = parse_bool(scalar(r["pnl_friction"], "run.pnl_friction"), "run.pnl_friction");
    }
    if (r["histogram_bins"]) {
      c.run.histogram_bins = parse_unsigned(scalar(r["histogram_bins"], "run.histogram_bins"), "run.histogram_bins");
    }
    if (r["strategies"]) c.run.strategies = scalar_list(r["strategies"], "run.strategies");
  }
  return c;
}

const std::map<std::string, std::string, std::less<>>& presets() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"single_base", R"(name: single_base
market:
  horizon: 1/12
  sigma: 0.5
  kappa: 0.03
  eta: 0.05
  penalty: 2.5
  initial_price: 2.5
  compliance_dates: [1/12]
players:
  - gen_lot: 0.1
    gen_cost: 0.25
    requirements: [5]
grid:
  time_steps: 100
  x_min: 0
  x_max: 7.5
  dx: 0.05
  s_max: 3
  ds: 0.05
  gradient: upwind
run:
  paths: 5000
  seed: 12345
  te_level: 0.95
)"},
      {"two_homog", R"(name: two_homog
market:
  horizon: 1/12
  sigma: 0.5
  kappa: 0.03
  eta: 0.05
  penalty: 2.5
  initial_price: 2.5
  compliance_dates: [1/12]
players:
  - gen_lot: 0.1
    gen_cost: 0.25
    requirements: [5]
  - gen_lot: 0.1
    gen_cost: 0.25
    requirements: [5]
grid:
  time_steps: 100
  x_min: 0
  x_max: 7
  dx: 0.1
  s_max: 3
  ds: 0.05
  gradient: upwind
run:
  paths: 5000
  seed: 12345
  te_level: 0.95
)"},
      {"two_hetero", R"(name: two_hetero
market:
  horizon: 1/12
  sigma: 0.5
  kappa: 0.03
  eta: 0.05
  penalty: 2.5
  initial_price: 2.5
  compliance_dates: [1/12]
players:
  - gen_lot: 0.1
    gen_cost: 0.25
    requirements: [5]
  - gen_lot: 0.4
    gen_cost: 1.0
    requirements: [5]
grid:
  time_steps: 100
  x_min: 0
  x_max: 7
  dx: 0.1
  s_max: 3
  ds: 0.05
  gradient: upwind
run:
  paths: 5000
  seed: 12345
  te_level: 0.95
)"},
      {"two_period", R"(name: two_period
market:
  horizon: 2/12
  sigma: 0.5
  kappa: 0.06
  eta: 0.05
  penalty: 2.5
  initial_price: 2.5
  compliance_dates: [1/12, 2/12]
players:
  - gen_lot: 0.1
    gen_cost: 0.25
    requirements: [5, 5]
  - gen_lot: 0.4
    gen_cost: 1.0
    requirements: [5, 5]
grid:
  time_steps: 150
  x_min: 0
  x_max: 7
  dx: 0.1
  s_max: 3
  ds: 0.05
  gradient: upwind
run:
  paths: 5000
  seed: 12345
  te_level: 0.95
)"},
  };
  return table;
}

}  // namespace

void Config::validate() const {
  market.validate();
  if (players.empty() || players.size() > 2) throw ConfigError("players", "expected 1 or 2 players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    try {
      players[i].validate(market.periods());
    } catch (const ConfigError& e) {
      throw ConfigError("players." + std::to_string(i) + "." + e.field(), e.what());
    }
  }
  if (std::abs(grid.time.end - market.horizon) > 0.0 || grid.time.start != 0.0) {
    throw ConfigError("grid.time", "time grid must span [0, market.horizon]");
  }
  grid.validate(players);
  period_grids(market, grid);
  if (run.paths == 0) throw ConfigError("run.paths", "must be > 0");
  if (run.threads == 0) throw ConfigError("run.threads", "must be >= 1");
  if (!(run.te_level > 0.0 && run.te_level < 1.0)) throw ConfigError("run.te_level", "must lie in (0, 1)");
  if (run.histogram_bins == 0) throw ConfigError("run.histogram_bins", "must be >= 1");
}

Config parse_config(const std::string& text, const std::vector<Override>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("cannot parse configuration: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const Override& o : overrides) apply_override(root, o);
  Config c = from_yaml(root);
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& kv : presets()) out.push_back(kv.first);
  return out;
}

const std::string& preset_text(std::string_view name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  return it->second;
}

Config load_preset(std::string_view name, const std::vector<Override>& overrides) {
  return parse_config(preset_text(name), overrides);
}

std::vector<std::string> config_keys(std::size_t players) {
  std::vector<std::string> out{"name"};
  for (const auto& [section, keys] : kSectionKeys) {
    if (section == "players") {
      for (std::size_t i = 0; i < players; ++i) {
        for (const auto& k : keys) out.push_back("players." + std::to_string(i) + "." + k);
      }
    } else {
      for (const auto& k : keys) out.push_back(section + "." + k);
    }
  }
  return out;
}

std::vector<Override> env_overrides(std::size_t players,
                                    const std::function<const char*(const char*)>& getenv_fn) {
  std::vector<Override> out;
  for (const std::string& key : config_keys(players)) {
    std::string env = "OCM_" + key;
    for (char& ch : env) ch = ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = getenv_fn(env.c_str())) out.push_back({key, v});
  }
  return out;
}

std::string config_to_json(const Config& c, int indent) {
  Json j;
  j["name"] = c.name;
  j["market"] = {{"horizon", c.market.horizon},
                 {"sigma", c.market.sigma},
                 {"kappa", c.market.kappa},
                 {"eta", c.market.eta},
                 {"penalty", c.market.penalty},
                 {"initial_price", c.market.initial_price},
                 {"compliance_dates", c.market.compliance_dates}};
  j["players"] = Json::array();
  for (const PlayerSpec& p : c.players) {
    j["players"].push_back(
        {{"gen_lot", p.gen_lot}, {"gen_cost", p.gen_cost}, {"requirements", p.requirements}});
  }
  j["grid"] = {{"time_steps", c.grid.time.steps},
               {"x_min", c.grid.inventory.min},
               {"x_max", c.grid.inventory.max()},
               {"dx", c.grid.inventory.step},
               {"s_min", c.grid.price.min},
               {"s_max", c.grid.price.max()},
               {"ds", c.grid.price.step},
               {"gradient", to_string(c.grid.gradient)}};
  j["run"] = {{"paths", c.run.paths},
              {"seed", c.run.seed},
              {"threads", c.run.threads},
              {"te_level", c.run.te_level},
              {"naive_impact", c.run.naive_impact},
              {"pnl_friction", c.run.pnl_friction},
              {"histogram_bins", c.run.histogram_bins},
              {"strategies", c.run.strategies}};
  return j.dump(indent);
}

std::uint64_t config_hash(const Config& config) {
  const std::string text = config_to_json(config, -1);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ocm
