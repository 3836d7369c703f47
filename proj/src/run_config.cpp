#include "gfnoma/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace gfnoma {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ConfigError("section '" + section + "' must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_u64_if(const json& obj, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) {
    out = v.get<std::uint64_t>();
    return;
  }
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    return;
  }
  throw ConfigError(std::string("bad value for '") + key +
                    "': expected a non-negative integer");
}

template <typename Enum>
Enum parse_enum(const json& obj, const char* key, Enum fallback,
                std::initializer_list<std::pair<const char*, Enum>> names) {
  if (!obj.contains(key)) return fallback;
  std::string s;
  read_if(obj, key, s);
  for (const auto& [name, value] : names)
    if (s == name) return value;
  std::string options;
  for (const auto& [name, value] : names) {
    if (!options.empty()) options += ", ";
    options += name;
  }
  throw ConfigError(std::string("bad value '") + s + "' for '" + key +
                    "' (expected one of: " + options + ")");
}

void parse_radio(const json& obj, RadioConfig& r) {
  reject_unknown(obj, "radio",
                 {"cell_radius_m", "num_layers", "placement", "path_loss_exponent",
                  "path_loss_intercept", "noise_power_w", "noise_power_dbm",
                  "subchannel_bandwidth_hz", "carrier_frequency_hz", "power_levels_w",
                  "p_max_w", "rate_threshold", "rate_min", "threshold_mode"});
  read_if(obj, "cell_radius_m", r.cell_radius_m);
  read_if(obj, "num_layers", r.num_layers);
  r.placement = parse_enum(obj, "placement", r.placement,
                           {{"uniform", Placement::uniform},
                            {"layer_balanced", Placement::layer_balanced}});
  read_if(obj, "path_loss_exponent", r.path_loss_exponent);
  read_if(obj, "path_loss_intercept", r.path_loss_intercept);
  if (obj.contains("noise_power_w") && obj.contains("noise_power_dbm"))
    throw ConfigError("give either noise_power_w or noise_power_dbm, not both");
  read_if(obj, "noise_power_w", r.noise_power_w);
  if (obj.contains("noise_power_dbm")) {
    double dbm = 0.0;
    read_if(obj, "noise_power_dbm", dbm);
    r.noise_power_w = dbm_to_w(dbm);
  }
  read_if(obj, "subchannel_bandwidth_hz", r.subchannel_bandwidth_hz);
  read_if(obj, "carrier_frequency_hz", r.carrier_frequency_hz);
  read_if(obj, "power_levels_w", r.power_levels_w);
  read_if(obj, "p_max_w", r.p_max_w);
  read_if(obj, "rate_threshold", r.rate_threshold);
  read_if(obj, "rate_min", r.rate_min);
  r.threshold_mode = parse_enum(obj, "threshold_mode", r.threshold_mode,
                                {{"spectral", ThresholdMode::spectral},
                                 {"absolute", ThresholdMode::absolute}});
}

void parse_traffic(const json& obj, TrafficModel& t) {
  reject_unknown(obj, "traffic", {"mode", "fixed_count", "poisson_mean"});
  t.mode = parse_enum(obj, "mode", t.mode,
                      {{"fixed", TrafficModel::Mode::fixed},
                       {"poisson", TrafficModel::Mode::poisson}});
  read_if(obj, "fixed_count", t.fixed_count);
  read_if(obj, "poisson_mean", t.poisson_mean);
}

void parse_env(const json& obj, EnvConfig& e) {
  reject_unknown(obj, "env",
                 {"num_subchannels", "steps_per_episode", "reward_mode", "access_mode",
                  "power_mode", "fixed_level_index", "restricted_levels",
                  "resample_per_slot"});
  read_if(obj, "num_subchannels", e.num_subchannels);
  read_if(obj, "steps_per_episode", e.steps_per_episode);
  e.reward_mode = parse_enum(obj, "reward_mode", e.reward_mode,
                             {{"gated", RewardMode::gated}, {"raw", RewardMode::raw}});
  e.access_mode = parse_enum(obj, "access_mode", e.access_mode,
                             {{"noma", AccessMode::noma}, {"oma", AccessMode::oma}});
  e.power_mode = parse_enum(obj, "power_mode", e.power_mode,
                            {{"pool_search", PowerMode::pool_search},
                             {"fixed", PowerMode::fixed},
                             {"restricted", PowerMode::restricted}});
  read_if(obj, "fixed_level_index", e.fixed_level_index);
  read_if(obj, "restricted_levels", e.restricted_levels);
  read_if(obj, "resample_per_slot", e.resample_per_slot);
}

void parse_agent(const json& obj, AgentConfig& a) {
  reject_unknown(obj, "agent",
                 {"algorithm", "hidden", "discount", "epsilon_start", "epsilon_min",
                  "epsilon_decay", "target_sync_period", "replay_capacity",
                  "batch_size", "learning_rate", "adam_beta1", "adam_beta2",
                  "adam_epsilon"});
  a.algorithm = parse_enum(obj, "algorithm", a.algorithm,
                           {{"dqn", Algorithm::dqn}, {"ddqn", Algorithm::ddqn}});
  read_if(obj, "hidden", a.hidden);
  read_if(obj, "discount", a.discount);
  read_if(obj, "epsilon_start", a.epsilon_start);
  read_if(obj, "epsilon_min", a.epsilon_min);
  read_if(obj, "epsilon_decay", a.epsilon_decay);
  read_if(obj, "target_sync_period", a.target_sync_period);
  std::uint64_t cap = a.replay_capacity;
  read_u64_if(obj, "replay_capacity", cap);
  a.replay_capacity = static_cast<std::size_t>(cap);
  read_if(obj, "batch_size", a.batch_size);
  read_if(obj, "learning_rate", a.adam.learning_rate);
  read_if(obj, "adam_beta1", a.adam.beta1);
  read_if(obj, "adam_beta2", a.adam.beta2);
  read_if(obj, "adam_epsilon", a.adam.epsilon);
}

void parse_run(const json& obj, RunConfig& c) {
  reject_unknown(obj, "run",
                 {"episodes", "seed", "replicates", "output_dir", "tail_fraction"});
  read_if(obj, "episodes", c.episodes);
  read_u64_if(obj, "seed", c.seed);
  read_if(obj, "replicates", c.replicates);
  read_if(obj, "output_dir", c.output_dir);
  read_if(obj, "tail_fraction", c.tail_fraction);
}

void parse_compare(const json& obj, CompareConfig& c) {
  reject_unknown(obj, "compare",
                 {"mode", "seeds", "pmax_values_w", "lr_values", "subchannel_values",
                  "bandwidth_mode", "total_bandwidth_hz"});
  read_if(obj, "mode", c.mode);
  if (obj.contains("seeds")) {
    c.seeds.clear();
    if (!obj.at("seeds").is_array()) throw ConfigError("'seeds' must be an array");
    for (const auto& s : obj.at("seeds")) {
      if (s.is_number_unsigned())
        c.seeds.push_back(s.get<std::uint64_t>());
      else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
        c.seeds.push_back(static_cast<std::uint64_t>(s.get<std::int64_t>()));
      else
        throw ConfigError("'seeds' entries must be non-negative integers");
    }
  }
  read_if(obj, "pmax_values_w", c.pmax_values_w);
  read_if(obj, "lr_values", c.lr_values);
  read_if(obj, "subchannel_values", c.subchannel_values);
  read_if(obj, "bandwidth_mode", c.bandwidth_mode);
  read_if(obj, "total_bandwidth_hz", c.total_bandwidth_hz);
}

void parse_oracle(const json& obj, OracleCheckConfig& c) {
  reject_unknown(obj, "oracle", {"num_snapshots", "budget", "rollout_steps"});
  read_if(obj, "num_snapshots", c.num_snapshots);
  read_u64_if(obj, "budget", c.budget);
  read_if(obj, "rollout_steps", c.rollout_steps);
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

void RunConfig::validate() const {
  try {
    env.validate();
    agent.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (episodes < 1) throw ConfigError("run: episodes must be >= 1");
  if (replicates < 1) throw ConfigError("run: replicates must be >= 1");
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
    throw ConfigError("run: tail_fraction must be in (0,1]");
  if (output_dir.empty()) throw ConfigError("run: output_dir must be non-empty");

  static const char* kModes[] = {"dqn_vs_ddqn",     "noma_vs_oma", "pool_vs_fixed",
                                 "subchannel_sweep", "pmax_sweep",  "lr_sweep"};
  bool mode_ok = false;
  for (const char* m : kModes)
    if (compare.mode == m) mode_ok = true;
  if (!mode_ok) throw ConfigError("compare: unknown mode '" + compare.mode + "'");
  if (compare.seeds.empty()) throw ConfigError("compare: seeds must be non-empty");
  if (compare.bandwidth_mode != "split" && compare.bandwidth_mode != "per_subchannel")
    throw ConfigError("compare: bandwidth_mode must be split or per_subchannel");
  if (!(compare.total_bandwidth_hz > 0.0))
    throw ConfigError("compare: total_bandwidth_hz must be > 0");
  for (const double p : compare.pmax_values_w)
    if (!(p > 0.0)) throw ConfigError("compare: pmax_values_w entries must be > 0");
  for (const double lr : compare.lr_values)
    if (!(lr > 0.0)) throw ConfigError("compare: lr_values entries must be > 0");
  for (const int m : compare.subchannel_values)
    if (m < 1) throw ConfigError("compare: subchannel_values entries must be >= 1");
  if (oracle.num_snapshots < 1) throw ConfigError("oracle: num_snapshots must be >= 1");
  if (oracle.rollout_steps < 1) throw ConfigError("oracle: rollout_steps must be >= 1");
  if (oracle.budget == 0) throw ConfigError("oracle: budget must be >= 1");
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_of_byte(text, e.byte)) +
                      ": " + e.what());
  }
  reject_unknown(root, "top level",
                 {"radio", "traffic", "env", "agent", "run", "compare", "oracle"});

  RunConfig cfg;
  try {
    if (root.contains("radio")) parse_radio(root.at("radio"), cfg.env.radio);
    if (root.contains("traffic")) parse_traffic(root.at("traffic"), cfg.env.traffic);
    if (root.contains("env")) parse_env(root.at("env"), cfg.env);
    if (root.contains("agent")) parse_agent(root.at("agent"), cfg.agent);
    if (root.contains("run")) parse_run(root.at("run"), cfg);
    if (root.contains("compare")) parse_compare(root.at("compare"), cfg.compare);
    if (root.contains("oracle")) parse_oracle(root.at("oracle"), cfg.oracle);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json root;
  const auto& r = cfg.env.radio;
  root["radio"] = {{"cell_radius_m", r.cell_radius_m},
                   {"num_layers", r.num_layers},
                   {"placement", placement_name(r.placement)},
                   {"path_loss_exponent", r.path_loss_exponent},
                   {"path_loss_intercept", r.path_loss_intercept},
                   {"noise_power_w", r.noise_power_w},
                   {"subchannel_bandwidth_hz", r.subchannel_bandwidth_hz},
                   {"carrier_frequency_hz", r.carrier_frequency_hz},
                   {"power_levels_w", r.power_levels_w},
                   {"p_max_w", r.p_max_w},
                   {"rate_threshold", r.rate_threshold},
                   {"rate_min", r.rate_min},
                   {"threshold_mode", threshold_mode_name(r.threshold_mode)}};
  const auto& t = cfg.env.traffic;
  root["traffic"] = {
      {"mode", t.mode == TrafficModel::Mode::fixed ? "fixed" : "poisson"},
      {"fixed_count", t.fixed_count},
      {"poisson_mean", t.poisson_mean}};
  const auto& e = cfg.env;
  root["env"] = {{"num_subchannels", e.num_subchannels},
                 {"steps_per_episode", e.steps_per_episode},
                 {"reward_mode", e.reward_mode == RewardMode::gated ? "gated" : "raw"},
                 {"access_mode", e.access_mode == AccessMode::noma ? "noma" : "oma"},
                 {"power_mode", e.power_mode == PowerMode::pool_search ? "pool_search"
                                : e.power_mode == PowerMode::fixed     ? "fixed"
                                                                       : "restricted"},
                 {"fixed_level_index", e.fixed_level_index},
                 {"restricted_levels", e.restricted_levels},
                 {"resample_per_slot", e.resample_per_slot}};
  const auto& a = cfg.agent;
  root["agent"] = {{"algorithm", a.algorithm == Algorithm::dqn ? "dqn" : "ddqn"},
                   {"hidden", a.hidden},
                   {"discount", a.discount},
                   {"epsilon_start", a.epsilon_start},
                   {"epsilon_min", a.epsilon_min},
                   {"epsilon_decay", a.epsilon_decay},
                   {"target_sync_period", a.target_sync_period},
                   {"replay_capacity", a.replay_capacity},
                   {"batch_size", a.batch_size},
                   {"learning_rate", a.adam.learning_rate},
                   {"adam_beta1", a.adam.beta1},
                   {"adam_beta2", a.adam.beta2},
                   {"adam_epsilon", a.adam.epsilon}};
  root["run"] = {{"episodes", cfg.episodes},
                 {"seed", cfg.seed},
                 {"replicates", cfg.replicates},
                 {"output_dir", cfg.output_dir},
                 {"tail_fraction", cfg.tail_fraction}};
  root["compare"] = {{"mode", cfg.compare.mode},
                     {"seeds", cfg.compare.seeds},
                     {"pmax_values_w", cfg.compare.pmax_values_w},
                     {"lr_values", cfg.compare.lr_values},
                     {"subchannel_values", cfg.compare.subchannel_values},
                     {"bandwidth_mode", cfg.compare.bandwidth_mode},
                     {"total_bandwidth_hz", cfg.compare.total_bandwidth_hz}};
  root["oracle"] = {{"num_snapshots", cfg.oracle.num_snapshots},
                    {"budget", cfg.oracle.budget},
                    {"rollout_steps", cfg.oracle.rollout_steps}};
  return root.dump(2);
}

}  // namespace gfnoma
