#include "gfnoma/pool.hpp"

#include <cmath>

namespace gfnoma {

namespace {

int modal_level(const std::vector<std::int64_t>& row) {
  int best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = static_cast<int>(i);
  return best;
}

PowerPool pool_from_counts(std::vector<std::vector<std::int64_t>> counts,
                           const EnvConfig& cfg) {
  PowerPool pool;
  pool.counts = std::move(counts);
  const int layers = static_cast<int>(pool.counts.size());
  for (int l = 0; l < layers; ++l) {
    std::int64_t visits = 0;
    for (const auto c : pool.counts[l]) visits += c;
    if (visits == 0)
      throw IncompletePoolError("pool: layer " + std::to_string(l + 1) +
                                " has no visits in the analyzed window");
    const int idx = modal_level(pool.counts[l]);
    pool.level_index.push_back(idx);
    pool.level_w.push_back(cfg.radio.power_levels_w[idx]);
  }
  return pool;
}

}  // namespace

PowerPool extract_pool(const std::vector<StepRecord>& steps, int episodes,
                       const EnvConfig& cfg, double tail_fraction,
                       const std::string& algorithm) {
  if (steps.empty()) throw std::invalid_argument("pool: empty step history");
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
    throw std::invalid_argument("pool: tail_fraction must be in (0,1]");
  if (episodes < 1) throw std::invalid_argument("pool: episodes must be >= 1");

  const int window =
      std::max(1, static_cast<int>(std::floor(tail_fraction * episodes + 1e-9)));
  const int first = episodes - window + 1;

  std::vector<std::vector<std::int64_t>> counts(
      cfg.radio.num_layers,
      std::vector<std::int64_t>(cfg.radio.num_power_levels(), 0));
  for (const auto& rec : steps) {
    if (rec.episode < first) continue;
    for (std::size_t i = 0; i < rec.layer.size(); ++i)
      ++counts[rec.layer[i] - 1][rec.power_index[i]];
  }

  PowerPool pool = pool_from_counts(std::move(counts), cfg);
  pool.episodes_analyzed = window;
  pool.first_episode = first;
  pool.tail_fraction = tail_fraction;
  pool.algorithm = algorithm;
  return pool;
}

PoolValidation validate_pool(const PowerPool& pool, const EnvConfig& cfg) {
  PoolValidation v;
  const int np = cfg.radio.num_power_levels();
  v.one_level_per_layer =
      static_cast<int>(pool.level_index.size()) == cfg.radio.num_layers;
  v.proper_subset = static_cast<int>(pool.level_index.size()) < np;
  v.levels_in_set = true;
  for (const int idx : pool.level_index)
    if (idx < 0 || idx >= np) v.levels_in_set = false;
  v.levels_distinct = true;
  for (std::size_t a = 0; a < pool.level_index.size(); ++a)
    for (std::size_t b = a + 1; b < pool.level_index.size(); ++b)
      if (pool.level_index[a] == pool.level_index[b]) v.levels_distinct = false;
  return v;
}

PowerPool greedy_pool_readout(const std::vector<Agent>& agents, const EnvConfig& cfg,
                              const std::vector<Snapshot>& snapshots,
                              int steps_per_snapshot) {
  if (snapshots.empty()) throw std::invalid_argument("pool: no snapshots given");
  if (steps_per_snapshot < 1)
    throw std::invalid_argument("pool: steps_per_snapshot must be >= 1");

  std::vector<UserAction> action_table(cfg.action_count());
  for (int a = 0; a < cfg.action_count(); ++a)
    action_table[a] = decode_flat_action(cfg, a);

  std::vector<std::vector<std::int64_t>> counts(
      cfg.radio.num_layers,
      std::vector<std::int64_t>(cfg.radio.num_power_levels(), 0));
  const int settle = steps_per_snapshot / 2;
  for (const auto& snap : snapshots) {
    const int n = static_cast<int>(snap.size());
    if (static_cast<int>(agents.size()) != n)
      throw std::invalid_argument("pool: agent count != snapshot user count");
    std::vector<double> state(n, 0.0);
    double prev = 0.0;
    JointAction joint(n);
    for (int t = 0; t < steps_per_snapshot; ++t) {
      for (int i = 0; i < n; ++i) joint[i] = action_table[agents[i].greedy_action(state)];
      if (t >= settle)
        for (int i = 0; i < n; ++i)
          ++counts[snap[i].layer - 1][joint[i].power_index];
      const StepOutcome out = evaluate_joint_action(cfg, snap, joint, prev, t);
      prev = out.sum_rate_se;
      state = out.next_state;
    }
  }

  PowerPool pool = pool_from_counts(std::move(counts), cfg);
  pool.episodes_analyzed = static_cast<int>(snapshots.size());
  pool.algorithm = "greedy_readout";
  return pool;
}

}  // namespace gfnoma
