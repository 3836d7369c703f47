#include "gfnoma/agent.hpp"

#include <stdexcept>

namespace gfnoma {

void AgentConfig::validate() const {
  if (discount < 0.0 || discount > 1.0)
    throw std::invalid_argument("agent: discount must be in [0,1]");
  if (epsilon_min < 0.0 || epsilon_min > epsilon_start || epsilon_start > 1.0)
    throw std::invalid_argument("agent: need 0 <= epsilon_min <= epsilon_start <= 1");
  if (!(epsilon_decay > 0.0) || epsilon_decay > 1.0)
    throw std::invalid_argument("agent: epsilon_decay must be in (0,1]");
  if (target_sync_period < 1) throw std::invalid_argument("agent: target_sync_period must be >= 1");
  if (replay_capacity == 0) throw std::invalid_argument("agent: replay_capacity must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("agent: batch_size must be >= 1");
  if (static_cast<std::size_t>(batch_size) > replay_capacity)
    throw std::invalid_argument("agent: batch_size must not exceed replay_capacity");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("agent: hidden sizes must be >= 1");
}

int argmax(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw std::invalid_argument("argmax: empty vector");
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

double dqn_target(double reward, bool done, double discount,
                  const Eigen::VectorXd& target_next_q) {
  if (done) return reward;
  return reward + discount * target_next_q.maxCoeff();
}

double ddqn_target(double reward, bool done, double discount,
                   const Eigen::VectorXd& online_next_q,
                   const Eigen::VectorXd& target_next_q) {
  if (done) return reward;
  return reward + discount * target_next_q(argmax(online_next_q));
}

namespace {

MlpSpec make_spec(const AgentConfig& cfg, int state_dim, int num_actions) {
  MlpSpec spec;
  spec.inputs = state_dim;
  spec.hidden = cfg.hidden;
  spec.outputs = num_actions;
  return spec;
}

}  // namespace

Agent::Agent(const AgentConfig& cfg, int state_dim, int num_actions, Rng& rng)
    : cfg_(cfg),
      state_dim_(state_dim),
      num_actions_(num_actions),
      epsilon_(cfg.epsilon_start),
      online_(make_spec(cfg, state_dim, num_actions)),
      target_(make_spec(cfg, state_dim, num_actions)),
      opt_(online_, cfg.adam),
      replay_(cfg.replay_capacity) {
  cfg_.validate();
  if (state_dim < 1) throw std::invalid_argument("agent: state_dim must be >= 1");
  if (num_actions < 1) throw std::invalid_argument("agent: num_actions must be >= 1");
  online_.init_params(rng);
  target_ = online_;
}

int Agent::select_action(const std::vector<double>& state, Rng& rng) {
  if (rng.uniform_half_open() < epsilon_)
    return static_cast<int>(rng.below(static_cast<std::uint32_t>(num_actions_)));
  return greedy_action(state);
}

int Agent::greedy_action(const std::vector<double>& state) const {
  if (static_cast<int>(state.size()) != state_dim_)
    throw std::invalid_argument("agent: state size mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(state.data(), state_dim_);
  return argmax(online_.forward(x));
}

void Agent::remember(Experience e) { replay_.push(std::move(e)); }

std::optional<double> Agent::train_step(Rng& rng) {
  const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);
  if (!replay_.ready(batch)) return std::nullopt;

  const auto idx = replay_.sample_indices(batch, rng);
  Eigen::MatrixXd states(state_dim_, batch);
  Eigen::MatrixXd next_states(state_dim_, batch);
  std::vector<int> actions(batch);
  Eigen::VectorXd targets(batch);

  for (std::size_t k = 0; k < batch; ++k) {
    const Experience& e = replay_.at(idx[k]);
    for (int d = 0; d < state_dim_; ++d) {
      states(d, static_cast<Eigen::Index>(k)) = e.state[d];
      next_states(d, static_cast<Eigen::Index>(k)) = e.next_state[d];
    }
    actions[k] = e.action;
  }

  const Eigen::MatrixXd target_next = target_.forward_batch(next_states);
  Eigen::MatrixXd online_next;
  if (cfg_.algorithm == Algorithm::ddqn) online_next = online_.forward_batch(next_states);

  for (std::size_t k = 0; k < batch; ++k) {
    const Experience& e = replay_.at(idx[k]);
    const auto col = static_cast<Eigen::Index>(k);
    targets(col) = cfg_.algorithm == Algorithm::ddqn
                       ? ddqn_target(e.reward, e.done, cfg_.discount,
                                     online_next.col(col), target_next.col(col))
                       : dqn_target(e.reward, e.done, cfg_.discount, target_next.col(col));
  }

  Mlp::Gradients grads;
  const double loss = online_.loss_and_gradients(states, actions, targets, &grads);
  opt_.step(online_, grads);
  return loss;
}

void Agent::decay_epsilon() {
  epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
}

}  // namespace gfnoma
