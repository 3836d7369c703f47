#include "gfnoma/trainer.hpp"

#include <stdexcept>

namespace gfnoma {

TrainingResult run_training(const EnvConfig& env_cfg, const AgentConfig& agent_cfg,
                            int episodes, std::uint64_t seed) {
  env_cfg.validate();
  agent_cfg.validate();
  if (episodes < 1) throw std::invalid_argument("training: episodes must be >= 1");
  if (env_cfg.traffic.mode != TrafficModel::Mode::fixed)
    throw std::invalid_argument(
        "training: traffic mode must be fixed so the agent population is stable");

  Rng rng(seed);
  NomaEnv env(env_cfg);
  std::vector<double> state = env.reset(rng);
  const int n = env.num_users();
  const int num_actions = env_cfg.action_count();

  // flat index -> concrete action, computed once
  std::vector<UserAction> action_table(num_actions);
  for (int a = 0; a < num_actions; ++a) action_table[a] = decode_flat_action(env_cfg, a);

  TrainingResult result;
  result.num_users = n;
  result.agents.reserve(n);
  for (int i = 0; i < n; ++i) result.agents.emplace_back(agent_cfg, n, num_actions, rng);

  std::vector<int> flats(n);
  JointAction joint(n);

  for (int ep = 1; ep <= episodes; ++ep) {
    if (ep > 1) state = env.reset(rng);
    EpisodeStats stats;
    stats.episode = ep;
    stats.epsilon = result.agents.front().epsilon();
    double loss_sum = 0.0;
    int loss_count = 0;

    for (int t = 0; t < env_cfg.steps_per_episode; ++t) {
      StepRecord rec;
      rec.episode = ep;
      rec.step = t;
      rec.layer.resize(n);
      rec.power_index.resize(n);
      rec.subchannel.resize(n);
      for (int i = 0; i < n; ++i) rec.layer[i] = env.snapshot()[i].layer;

      for (int i = 0; i < n; ++i) {
        flats[i] = result.agents[i].select_action(state, rng);
        joint[i] = action_table[flats[i]];
        rec.power_index[i] = joint[i].power_index;
        rec.subchannel[i] = joint[i].subchannel;
      }

      const StepOutcome out = env.step(joint, rng);
      for (int i = 0; i < n; ++i) {
        result.agents[i].remember(
            {state, flats[i], out.reward, out.next_state, out.done});
      }
      for (auto& agent : result.agents) {
        if (const auto loss = agent.train_step(rng)) {
          loss_sum += *loss;
          ++loss_count;
        }
      }

      stats.reward_sum += out.reward;
      stats.sum_rate_se += out.sum_rate_se;
      stats.sum_rate_bps += out.sum_rate_bps;
      if (out.constraints.all()) {
        stats.admitted_rate_se += out.sum_rate_se;
        stats.admitted_rate_bps += out.sum_rate_bps;
      }
      stats.budget_violations += out.constraints.budget_violations();
      stats.occupancy_violations += out.constraints.occupancy_violations();
      stats.rate_violations += out.constraints.rate_violations();
      rec.sum_rate_se = out.sum_rate_se;
      rec.reward = out.reward;
      rec.gate_passed = out.gate_passed;
      result.steps.push_back(std::move(rec));
      state = out.next_state;
    }

    stats.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    result.episodes.push_back(stats);
    for (auto& agent : result.agents) agent.decay_epsilon();
    if (ep % agent_cfg.target_sync_period == 0)
      for (auto& agent : result.agents) agent.sync_target();
  }
  return result;
}

double greedy_sum_rate(const std::vector<Agent>& agents, const EnvConfig& env_cfg,
                       const Snapshot& snap, int steps) {
  if (steps < 1) throw std::invalid_argument("greedy_sum_rate: steps must be >= 1");
  const int n = static_cast<int>(snap.size());
  if (static_cast<int>(agents.size()) != n)
    throw std::invalid_argument("greedy_sum_rate: agent count != user count");

  std::vector<UserAction> action_table(env_cfg.action_count());
  for (int a = 0; a < env_cfg.action_count(); ++a)
    action_table[a] = decode_flat_action(env_cfg, a);

  std::vector<double> state(n, 0.0);
  std::vector<double> sums;
  double prev = 0.0;
  JointAction joint(n);
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < n; ++i) joint[i] = action_table[agents[i].greedy_action(state)];
    const StepOutcome out = evaluate_joint_action(env_cfg, snap, joint, prev, t);
    prev = out.sum_rate_se;
    state = out.next_state;
    sums.push_back(out.sum_rate_se);
  }
  const int tail = (steps + 1) / 2;
  double total = 0.0;
  for (int t = steps - tail; t < steps; ++t) total += sums[t];
  return total / tail;
}

}  // namespace gfnoma
