#pragma once

#include <utility>
#include <vector>

#include "gfnoma/radio.hpp"
#include "gfnoma/rng.hpp"

namespace gfnoma {

// gated: reward is the sum rate when every constraint holds and the sum rate
//        did not drop below the previous slot's, else 0.
// raw:   reward is the sum rate unconditionally (used by exhaustive search).
enum class RewardMode { gated, raw };
enum class AccessMode { noma, oma };

// pool_search: agents choose any configured power level.
// fixed:       every user transmits at one pinned level (baseline).
// restricted:  agents choose from a subset (evaluating an extracted pool).
enum class PowerMode { pool_search, fixed, restricted };

struct EnvConfig {
  RadioConfig radio;
  TrafficModel traffic;
  int num_subchannels = 4;
  int steps_per_episode = 50;
  RewardMode reward_mode = RewardMode::gated;
  AccessMode access_mode = AccessMode::noma;
  PowerMode power_mode = PowerMode::pool_search;
  int fixed_level_index = -1;          // required when power_mode == fixed
  std::vector<int> restricted_levels;  // required when power_mode == restricted
  // When false, geometry and fading drawn at reset stay frozen for the whole
  // episode; only actions move the system.
  bool resample_per_slot = true;

  void validate() const;
  // Global power_levels_w indices an agent may pick, ascending.
  std::vector<int> selectable_levels() const;
  // Flat action space per agent: selectable level slots * subchannels.
  int action_count() const;
};

struct UserAction {
  int power_index = 0;  // index into radio.power_levels_w
  int subchannel = 0;
};
using JointAction = std::vector<UserAction>;

// decoded:          SIC removed all stronger users; rate is genuine.
// below_threshold:  decoded, but the rate misses the decode gate, which stops
//                   cancellation for everyone after it.
// failed_sic:       an earlier user missed the gate; rate forced to 0.
// collided:         OMA sub-channel carrying more than one user; rate 0.
enum class DecodeStatus { decoded, below_threshold, failed_sic, collided };

struct UserOutcome {
  int user = 0;
  int subchannel = 0;
  int decode_order = 0;  // position in the descending received-power order
  double tx_power_w = 0.0;
  double rx_power_w = 0.0;
  double sinr = 0.0;
  double rate_se = 0.0;   // bits/s/Hz; 0 unless status == decoded/below_threshold
  double rate_bps = 0.0;  // rate_se * subchannel bandwidth
  DecodeStatus status = DecodeStatus::decoded;
};

struct ConstraintReport {
  // Ordering and single-channel assignment hold by construction of the decode
  // path and the action encoding; they are reported for auditability.
  bool sic_order = true;
  bool single_channel = true;
  bool power_budget = true;   // per-sub-channel transmit sum within p_max
  bool min_occupancy = true;  // every occupied sub-channel pairs >= 2 users (NOMA only)
  bool min_rate = true;       // every user meets rate_min
  std::vector<bool> subchannel_budget_ok;
  std::vector<bool> subchannel_occupancy_ok;
  std::vector<bool> user_rate_ok;

  bool all() const {
    return sic_order && single_channel && power_budget && min_occupancy && min_rate;
  }
  int budget_violations() const;
  int occupancy_violations() const;
  int rate_violations() const;
};

struct StepOutcome {
  std::vector<double> next_state;  // per-user achieved rate_se this slot
  double reward = 0.0;             // spectral units, shared by all agents
  double sum_rate_se = 0.0;
  double sum_rate_bps = 0.0;
  bool gate_passed = false;  // constraints held and sum rate did not drop
  bool done = false;
  std::vector<UserOutcome> users;
  ConstraintReport constraints;
};

// Successive interference cancellation on one sub-channel. Input pairs are
// (user index, received power); order of the input does not matter. Ties in
// received power decode lower user index first.
struct SicEntry {
  int user = 0;
  double rx_power_w = 0.0;
};
std::vector<UserOutcome> decode_subchannel(const std::vector<SicEntry>& entries,
                                           const RadioConfig& cfg);

// Pure evaluation of one joint action against one snapshot: decode, rates,
// constraints, reward. Does not mutate anything; NomaEnv::step and the
// exhaustive search both call this.
StepOutcome evaluate_joint_action(const EnvConfig& cfg, const Snapshot& snap,
                                  const JointAction& action,
                                  double prev_sum_rate_se, int step_index);

class NomaEnv {
 public:
  explicit NomaEnv(EnvConfig cfg);

  // Draws the episode's user count and channel snapshot; previous-rate state
  // starts at all zeros.
  std::vector<double> reset(Rng& rng);
  StepOutcome step(const JointAction& action, Rng& rng);

  int num_users() const { return static_cast<int>(snap_.size()); }
  const Snapshot& snapshot() const { return snap_; }
  void set_snapshot(Snapshot snap);
  const EnvConfig& config() const { return cfg_; }
  double prev_sum_rate_se() const { return prev_sum_rate_se_; }
  int step_index() const { return step_index_; }

 private:
  EnvConfig cfg_;
  Snapshot snap_;
  double prev_sum_rate_se_ = 0.0;
  int step_index_ = 0;
};

// Flat action <-> (selectable level slot, subchannel). The flat index is
// slot * num_subchannels + subchannel; the slot maps through
// cfg.selectable_levels() to a global power level index.
UserAction decode_flat_action(const EnvConfig& cfg, int flat);
int encode_flat_action(const EnvConfig& cfg, const UserAction& a);

}  // namespace gfnoma
