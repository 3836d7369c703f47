#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gfnoma/net.hpp"
#include "gfnoma/replay.hpp"
#include "gfnoma/rng.hpp"

namespace gfnoma {

enum class Algorithm { dqn, ddqn };

struct AgentConfig {
  Algorithm algorithm = Algorithm::ddqn;
  std::vector<int> hidden = {250, 120, 64};
  double discount = 0.9;
  double epsilon_start = 1.0;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.99;  // multiplicative, applied per episode
  int target_sync_period = 10;  // episodes between hard target copies
  std::size_t replay_capacity = 10000;
  int batch_size = 64;
  AdamConfig adam;

  void validate() const;
};

// First index attaining the maximum.
int argmax(const Eigen::VectorXd& v);

// Bootstrap targets. `done` drops the bootstrap term.
double dqn_target(double reward, bool done, double discount,
                  const Eigen::VectorXd& target_next_q);
double ddqn_target(double reward, bool done, double discount,
                   const Eigen::VectorXd& online_next_q,
                   const Eigen::VectorXd& target_next_q);

// One independent learner: online net, frozen target copy, replay memory.
class Agent {
 public:
  Agent(const AgentConfig& cfg, int state_dim, int num_actions, Rng& rng);

  // epsilon-greedy over the flat action space
  int select_action(const std::vector<double>& state, Rng& rng);
  int greedy_action(const std::vector<double>& state) const;

  void remember(Experience e);
  // One sampled mini-batch and one Adam step; not-ready while the buffer
  // holds fewer than batch_size items.
  std::optional<double> train_step(Rng& rng);

  void sync_target() { target_ = online_; }
  void decay_epsilon();

  double epsilon() const { return epsilon_; }
  void set_epsilon(double e) { epsilon_ = e; }
  int num_actions() const { return num_actions_; }
  int state_dim() const { return state_dim_; }
  const AgentConfig& config() const { return cfg_; }
  const Mlp& online() const { return online_; }
  Mlp& online() { return online_; }
  const Mlp& target() const { return target_; }
  Mlp& target() { return target_; }
  AdamOptimizer& optimizer() { return opt_; }
  const AdamOptimizer& optimizer() const { return opt_; }
  const ReplayBuffer& replay() const { return replay_; }

 private:
  AgentConfig cfg_;
  int state_dim_;
  int num_actions_;
  double epsilon_;
  Mlp online_;
  Mlp target_;
  AdamOptimizer opt_;
  ReplayBuffer replay_;
};

}  // namespace gfnoma
