#pragma once

#include <cstdint>
#include <vector>

#include "gfnoma/agent.hpp"
#include "gfnoma/env.hpp"

namespace gfnoma {

struct EpisodeStats {
  int episode = 0;  // 1-based
  double reward_sum = 0.0;
  double mean_loss = 0.0;  // mean over agents and trained slots; 0 until the
                           // replay buffers fill
  double epsilon = 0.0;    // value in force during the episode
  int budget_violations = 0;
  int occupancy_violations = 0;
  int rate_violations = 0;
  double sum_rate_se = 0.0;  // accumulated over the episode's slots
  double sum_rate_bps = 0.0;
  // Same accumulation, but a slot contributes 0 unless every constraint held;
  // this is the delivered system throughput (an inadmissible allocation ships
  // nothing). The gate's nondecrease condition is excluded: it shapes the
  // reward, not the physics.
  double admitted_rate_se = 0.0;
  double admitted_rate_bps = 0.0;
};

struct StepRecord {
  int episode = 0;
  int step = 0;
  std::vector<int> layer;        // per user, for the geometry in force
  std::vector<int> power_index;  // per user, global power level index
  std::vector<int> subchannel;   // per user
  double sum_rate_se = 0.0;
  double reward = 0.0;
  bool gate_passed = false;
};

struct TrainingResult {
  std::vector<EpisodeStats> episodes;
  std::vector<StepRecord> steps;
  std::vector<Agent> agents;
  int num_users = 0;
};

// Independent-learner training: every agent observes the shared rate vector,
// acts on its own flat action, and receives the common reward. Requires fixed
// traffic so the agent population is stable across episodes.
TrainingResult run_training(const EnvConfig& env_cfg, const AgentConfig& agent_cfg,
                            int episodes, std::uint64_t seed);

// Greedy joint rollout on one frozen snapshot from the zero state; returns
// the mean sum rate (bits/s/Hz) over the last half of `steps` slots.
double greedy_sum_rate(const std::vector<Agent>& agents, const EnvConfig& env_cfg,
                       const Snapshot& snap, int steps = 10);

}  // namespace gfnoma
