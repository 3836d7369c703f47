#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfnoma/agent.hpp"
#include "gfnoma/env.hpp"

namespace gfnoma {

// Configuration problems the user can fix: unreadable file, malformed JSON,
// unknown keys, out-of-range values. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CompareConfig {
  std::string mode = "dqn_vs_ddqn";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<double> pmax_values_w = {1.0, 2.0, 2.5};
  std::vector<double> lr_values = {0.01, 0.001, 0.0001};
  std::vector<int> subchannel_values = {2, 3, 4};
  // split: B_s = total/M for each swept M; per_subchannel: B_s stays as
  // configured regardless of M.
  std::string bandwidth_mode = "split";
  double total_bandwidth_hz = 40e3;
};

struct OracleCheckConfig {
  int num_snapshots = 20;
  std::uint64_t budget = 10'000'000;
  int rollout_steps = 10;
};

struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  int episodes = 500;
  std::uint64_t seed = 1;
  int replicates = 1;
  std::string output_dir = "runs/out";
  double tail_fraction = 0.2;
  CompareConfig compare;
  OracleCheckConfig oracle;

  void validate() const;  // throws ConfigError
};

// Strict schema: unknown keys anywhere are rejected; every key is optional
// and falls back to the documented default. Errors carry file/line context.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin);

// Canonical JSON echo of a config (alphabetically ordered keys); hashing this
// string identifies the configuration in run metadata.
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace gfnoma
