#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfnoma/trainer.hpp"

namespace gfnoma {

class IncompletePoolError : public std::runtime_error {
 public:
  explicit IncompletePoolError(const std::string& msg) : std::runtime_error(msg) {}
};

// The artifact's product: one broadcast transmit power level per layer, with
// the selection tallies behind the choice kept for audit.
struct PowerPool {
  std::vector<int> level_index;  // per layer (index 0 = layer 1)
  std::vector<double> level_w;
  std::vector<std::vector<std::int64_t>> counts;  // [layer][power level]
  int episodes_analyzed = 0;
  int first_episode = 0;  // start of the tail window, 1-based
  double tail_fraction = 0.0;
  std::string algorithm;  // dqn / ddqn, carried from the run
};

struct PoolValidation {
  bool one_level_per_layer = false;  // pool size equals the layer count
  bool proper_subset = false;        // pool smaller than the configured level set
  bool levels_in_set = false;
  bool levels_distinct = false;

  bool all() const {
    return one_level_per_layer && proper_subset && levels_in_set && levels_distinct;
  }
};

// Tallies, over the last tail_fraction of episodes, the power level of every
// action taken by an agent located in each layer; the pool level per layer is
// the modal one (ties to the lowest level index). A layer with no visits in
// the window raises IncompletePoolError naming the layer. Pure function of
// its inputs.
PowerPool extract_pool(const std::vector<StepRecord>& steps, int episodes,
                       const EnvConfig& cfg, double tail_fraction = 0.2,
                       const std::string& algorithm = "");

PoolValidation validate_pool(const PowerPool& pool, const EnvConfig& cfg);

// Alternative readout: each trained agent's greedy power choice on frozen
// snapshots, tallied by the agent's layer. Same output shape as extract_pool.
PowerPool greedy_pool_readout(const std::vector<Agent>& agents, const EnvConfig& cfg,
                              const std::vector<Snapshot>& snapshots,
                              int steps_per_snapshot = 10);

}  // namespace gfnoma
