#pragma once

// Straight-line re-derivation of the decode and reward rules, written from
// the formulas with naive loops and none of the library's helper code. Used
// to cross-check evaluate_joint_action; keep this file independent of env.cpp
// internals.

#include <cmath>
#include <vector>

#include "gfnoma/env.hpp"

namespace gfnoma_ref {

struct RefResult {
  std::vector<double> rate_se;
  std::vector<double> rate_bps;
  double sum_se = 0.0;
  double sum_bps = 0.0;
  bool feasible = false;
  double reward = 0.0;
};

inline RefResult ref_evaluate(const gfnoma::EnvConfig& cfg, const gfnoma::Snapshot& snap,
                              const gfnoma::JointAction& act, double prev_sum_se) {
  const int n = static_cast<int>(snap.size());
  const auto& r = cfg.radio;
  RefResult res;
  res.rate_se.assign(n, 0.0);
  res.rate_bps.assign(n, 0.0);

  std::vector<double> rx(n);
  for (int i = 0; i < n; ++i)
    rx[i] = r.power_levels_w[act[i].power_index] * snap[i].gain;

  const bool spectral = r.threshold_mode == gfnoma::ThresholdMode::spectral;

  for (int ch = 0; ch < cfg.num_subchannels; ++ch) {
    std::vector<int> ids;
    for (int i = 0; i < n; ++i)
      if (act[i].subchannel == ch) ids.push_back(i);
    if (ids.empty()) continue;

    if (cfg.access_mode == gfnoma::AccessMode::oma) {
      if (ids.size() == 1) {
        const int u = ids[0];
        const double se = std::log2(1.0 + rx[u] / r.noise_power_w);
        res.rate_se[u] = se;
        res.rate_bps[u] = se * r.subchannel_bandwidth_hz;
      }
      continue;
    }

    // Decode order: repeatedly take the strongest remaining user, ties to the
    // lowest user index.
    std::vector<int> order;
    std::vector<bool> used(ids.size(), false);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      int best = -1;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (used[j]) continue;
        if (best < 0 || rx[ids[j]] > rx[ids[best]]) best = static_cast<int>(j);
      }
      used[best] = true;
      order.push_back(ids[best]);
    }

    bool stopped = false;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (stopped) break;  // later users keep rate 0
      const int u = order[pos];
      double interference = 0.0;
      for (std::size_t q = pos + 1; q < order.size(); ++q) interference += rx[order[q]];
      const double sinr = rx[u] / (interference + r.noise_power_w);
      const double se = std::log2(1.0 + sinr);
      res.rate_se[u] = se;
      res.rate_bps[u] = se * r.subchannel_bandwidth_hz;
      const double v = spectral ? se : se * r.subchannel_bandwidth_hz;
      if (v < r.rate_threshold) stopped = true;
    }
  }

  for (int i = 0; i < n; ++i) {
    res.sum_se += res.rate_se[i];
    res.sum_bps += res.rate_bps[i];
  }

  bool ok = true;
  for (int ch = 0; ch < cfg.num_subchannels; ++ch) {
    double tx = 0.0;
    int occ = 0;
    for (int i = 0; i < n; ++i) {
      if (act[i].subchannel != ch) continue;
      tx += r.power_levels_w[act[i].power_index];
      ++occ;
    }
    if (tx > r.p_max_w * (1.0 + 1e-12)) ok = false;
    if (cfg.access_mode == gfnoma::AccessMode::noma && occ == 1) ok = false;
  }
  for (int i = 0; i < n; ++i) {
    const double v = spectral ? res.rate_se[i] : res.rate_bps[i];
    if (v < r.rate_min) ok = false;
  }
  res.feasible = ok;

  if (cfg.reward_mode == gfnoma::RewardMode::gated) {
    res.reward = (ok && res.sum_se >= prev_sum_se) ? res.sum_se : 0.0;
  } else {
    res.reward = res.sum_se;
  }
  return res;
}

}  // namespace gfnoma_ref
