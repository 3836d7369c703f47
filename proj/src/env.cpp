#include "gfnoma/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gfnoma {

namespace {

// Slack for sums of configured levels landing a few ulp above p_max.
constexpr double kBudgetSlack = 1e-12;

bool meets(double rate_se, double rate_bps, double threshold, ThresholdMode mode) {
  return (mode == ThresholdMode::spectral ? rate_se : rate_bps) >= threshold;
}

}  // namespace

void EnvConfig::validate() const {
  radio.validate();
  traffic.validate();
  if (num_subchannels < 1) throw std::invalid_argument("env: num_subchannels must be >= 1");
  if (steps_per_episode < 1) throw std::invalid_argument("env: steps_per_episode must be >= 1");
  const int np = radio.num_power_levels();
  if (power_mode == PowerMode::fixed) {
    if (fixed_level_index < 0 || fixed_level_index >= np)
      throw std::invalid_argument("env: fixed_level_index out of range");
  }
  if (power_mode == PowerMode::restricted) {
    if (restricted_levels.empty())
      throw std::invalid_argument("env: restricted_levels must be non-empty");
    for (std::size_t i = 0; i < restricted_levels.size(); ++i) {
      const int idx = restricted_levels[i];
      if (idx < 0 || idx >= np)
        throw std::invalid_argument("env: restricted_levels entry out of range");
      if (i > 0 && restricted_levels[i] <= restricted_levels[i - 1])
        throw std::invalid_argument("env: restricted_levels must be strictly increasing");
    }
  }
}

std::vector<int> EnvConfig::selectable_levels() const {
  switch (power_mode) {
    case PowerMode::fixed:
      return {fixed_level_index};
    case PowerMode::restricted:
      return restricted_levels;
    case PowerMode::pool_search:
    default: {
      std::vector<int> all(radio.num_power_levels());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      return all;
    }
  }
}

int EnvConfig::action_count() const {
  return static_cast<int>(selectable_levels().size()) * num_subchannels;
}

int ConstraintReport::budget_violations() const {
  return static_cast<int>(std::count(subchannel_budget_ok.begin(),
                                     subchannel_budget_ok.end(), false));
}

int ConstraintReport::occupancy_violations() const {
  return static_cast<int>(std::count(subchannel_occupancy_ok.begin(),
                                     subchannel_occupancy_ok.end(), false));
}

int ConstraintReport::rate_violations() const {
  return static_cast<int>(std::count(user_rate_ok.begin(), user_rate_ok.end(), false));
}

std::vector<UserOutcome> decode_subchannel(const std::vector<SicEntry>& entries,
                                           const RadioConfig& cfg) {
  std::vector<SicEntry> order = entries;
  std::sort(order.begin(), order.end(), [](const SicEntry& a, const SicEntry& b) {
    if (a.rx_power_w != b.rx_power_w) return a.rx_power_w > b.rx_power_w;
    return a.user < b.user;
  });
  const int n = static_cast<int>(order.size());
  // Interference for position i is the sum of weaker users, accumulated from
  // the back so small tails are not computed by cancellation.
  std::vector<double> suffix(n + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + order[i].rx_power_w;

  std::vector<UserOutcome> out(n);
  bool blocked = false;
  for (int i = 0; i < n; ++i) {
    UserOutcome& u = out[i];
    u.user = order[i].user;
    u.decode_order = i;
    u.rx_power_w = order[i].rx_power_w;
    u.sinr = u.rx_power_w / (suffix[i + 1] + cfg.noise_power_w);
    if (blocked) {
      u.status = DecodeStatus::failed_sic;
      continue;  // rates stay 0
    }
    u.rate_se = std::log2(1.0 + u.sinr);
    u.rate_bps = u.rate_se * cfg.subchannel_bandwidth_hz;
    if (meets(u.rate_se, u.rate_bps, cfg.rate_threshold, cfg.threshold_mode)) {
      u.status = DecodeStatus::decoded;
    } else {
      // This user keeps its measured rate, but cancellation stops here.
      u.status = DecodeStatus::below_threshold;
      blocked = true;
    }
  }
  return out;
}

StepOutcome evaluate_joint_action(const EnvConfig& cfg, const Snapshot& snap,
                                  const JointAction& action,
                                  double prev_sum_rate_se, int step_index) {
  const int n = static_cast<int>(snap.size());
  if (static_cast<int>(action.size()) != n)
    throw std::invalid_argument("evaluate: action count " + std::to_string(action.size()) +
                                " != user count " + std::to_string(n));
  const int m = cfg.num_subchannels;
  const auto selectable = cfg.selectable_levels();
  const auto& levels = cfg.radio.power_levels_w;

  for (const auto& a : action) {
    if (a.subchannel < 0 || a.subchannel >= m)
      throw std::invalid_argument("evaluate: subchannel out of range");
    if (std::find(selectable.begin(), selectable.end(), a.power_index) == selectable.end())
      throw std::invalid_argument("evaluate: power_index not selectable");
  }

  StepOutcome out;
  out.users.resize(n);
  std::vector<std::vector<SicEntry>> per_channel(m);
  std::vector<double> tx_sum(m, 0.0);
  for (int i = 0; i < n; ++i) {
    const double tx = levels[action[i].power_index];
    const double rx = received_power(tx, snap[i].gain);
    per_channel[action[i].subchannel].push_back({i, rx});
    tx_sum[action[i].subchannel] += tx;
    out.users[i].user = i;
    out.users[i].subchannel = action[i].subchannel;
    out.users[i].tx_power_w = tx;
    out.users[i].rx_power_w = rx;
  }

  for (int ch = 0; ch < m; ++ch) {
    const auto& entries = per_channel[ch];
    if (entries.empty()) continue;
    if (cfg.access_mode == AccessMode::noma) {
      for (const auto& d : decode_subchannel(entries, cfg.radio)) {
        UserOutcome& u = out.users[d.user];
        u.decode_order = d.decode_order;
        u.sinr = d.sinr;
        u.rate_se = d.rate_se;
        u.rate_bps = d.rate_bps;
        u.status = d.status;
      }
    } else {
      // OMA: a sub-channel is useful only when exactly one user picked it.
      double total = 0.0;
      for (const auto& e : entries) total += e.rx_power_w;
      for (std::size_t k = 0; k < entries.size(); ++k) {
        UserOutcome& u = out.users[entries[k].user];
        u.decode_order = static_cast<int>(k);
        u.sinr = u.rx_power_w / (total - u.rx_power_w + cfg.radio.noise_power_w);
        if (entries.size() == 1) {
          u.rate_se = std::log2(1.0 + u.sinr);
          u.rate_bps = u.rate_se * cfg.radio.subchannel_bandwidth_hz;
          u.status = meets(u.rate_se, u.rate_bps, cfg.radio.rate_threshold,
                           cfg.radio.threshold_mode)
                         ? DecodeStatus::decoded
                         : DecodeStatus::below_threshold;
        } else {
          u.status = DecodeStatus::collided;
        }
      }
    }
  }

  ConstraintReport& rep = out.constraints;
  rep.subchannel_budget_ok.resize(m);
  rep.subchannel_occupancy_ok.resize(m);
  rep.user_rate_ok.resize(n);
  for (int ch = 0; ch < m; ++ch) {
    rep.subchannel_budget_ok[ch] =
        tx_sum[ch] <= cfg.radio.p_max_w * (1.0 + kBudgetSlack);
    rep.subchannel_occupancy_ok[ch] =
        cfg.access_mode == AccessMode::oma || per_channel[ch].empty() ||
        per_channel[ch].size() >= 2;
  }
  for (int i = 0; i < n; ++i) {
    const auto& u = out.users[i];
    rep.user_rate_ok[i] =
        meets(u.rate_se, u.rate_bps, cfg.radio.rate_min, cfg.radio.threshold_mode);
    out.sum_rate_se += u.rate_se;
    out.sum_rate_bps += u.rate_bps;
  }
  rep.power_budget = rep.budget_violations() == 0;
  rep.min_occupancy = rep.occupancy_violations() == 0;
  rep.min_rate = rep.rate_violations() == 0;

  out.gate_passed = rep.all() && out.sum_rate_se >= prev_sum_rate_se;
  if (cfg.reward_mode == RewardMode::gated) {
    out.reward = out.gate_passed ? out.sum_rate_se : 0.0;
  } else {
    out.reward = out.sum_rate_se;
  }
  out.next_state.resize(n);
  for (int i = 0; i < n; ++i) out.next_state[i] = out.users[i].rate_se;
  out.done = step_index + 1 >= cfg.steps_per_episode;
  return out;
}

NomaEnv::NomaEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<double> NomaEnv::reset(Rng& rng) {
  const int n = cfg_.traffic.sample_arrivals(rng);
  snap_ = sample_snapshot(cfg_.radio, n, rng);
  prev_sum_rate_se_ = 0.0;
  step_index_ = 0;
  return std::vector<double>(n, 0.0);
}

StepOutcome NomaEnv::step(const JointAction& action, Rng& rng) {
  StepOutcome out =
      evaluate_joint_action(cfg_, snap_, action, prev_sum_rate_se_, step_index_);
  prev_sum_rate_se_ = out.sum_rate_se;
  ++step_index_;
  if (cfg_.resample_per_slot && !out.done)
    snap_ = sample_snapshot(cfg_.radio, num_users(), rng);
  return out;
}

void NomaEnv::set_snapshot(Snapshot snap) {
  snap_ = std::move(snap);
  prev_sum_rate_se_ = 0.0;
  step_index_ = 0;
}

UserAction decode_flat_action(const EnvConfig& cfg, int flat) {
  if (flat < 0 || flat >= cfg.action_count())
    throw std::invalid_argument("decode_flat_action: index out of range");
  const auto selectable = cfg.selectable_levels();
  UserAction a;
  a.subchannel = flat % cfg.num_subchannels;
  a.power_index = selectable[flat / cfg.num_subchannels];
  return a;
}

int encode_flat_action(const EnvConfig& cfg, const UserAction& a) {
  const auto selectable = cfg.selectable_levels();
  const auto it = std::find(selectable.begin(), selectable.end(), a.power_index);
  if (it == selectable.end() || a.subchannel < 0 || a.subchannel >= cfg.num_subchannels)
    throw std::invalid_argument("encode_flat_action: action not representable");
  const int slot = static_cast<int>(it - selectable.begin());
  return slot * cfg.num_subchannels + a.subchannel;
}

}  // namespace gfnoma
