#include "gfnoma/oracle.hpp"

namespace gfnoma {

OracleResult exhaustive_best(const EnvConfig& cfg, const Snapshot& snap,
                             std::uint64_t budget, bool keep_table) {
  cfg.validate();
  const int n = static_cast<int>(snap.size());
  const int num_actions = cfg.action_count();
  if (n == 0) throw std::invalid_argument("oracle: snapshot is empty");

  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > budget / static_cast<std::uint64_t>(num_actions) + 1) {
      total = budget + 1;
      break;
    }
    total *= static_cast<std::uint64_t>(num_actions);
  }
  if (total > budget)
    throw EnumerationBudgetError(
        "oracle: joint action space " + std::to_string(num_actions) + "^" +
        std::to_string(n) + " exceeds budget " + std::to_string(budget));

  EnvConfig raw = cfg;
  raw.reward_mode = RewardMode::raw;

  std::vector<UserAction> action_table(num_actions);
  for (int a = 0; a < num_actions; ++a) action_table[a] = decode_flat_action(cfg, a);

  OracleResult res;
  if (keep_table) res.table.reserve(total);

  // Mixed-radix counter, user 0 most significant: enumeration order is
  // lexicographic, so keeping the first strict improvement realizes the
  // tie-break.
  std::vector<int> digits(n, 0);
  JointAction joint(n);
  while (true) {
    for (int i = 0; i < n; ++i) joint[i] = action_table[digits[i]];
    const StepOutcome out = evaluate_joint_action(raw, snap, joint, 0.0, 0);
    ++res.evaluated;
    const bool feasible = out.constraints.all();
    if (feasible &&
        (!res.feasible_found || out.sum_rate_se > res.best_sum_rate_se)) {
      res.feasible_found = true;
      res.best_sum_rate_se = out.sum_rate_se;
      res.best_action = joint;
      res.best_flat = digits;
    }
    if (keep_table) res.table.push_back({digits, out.sum_rate_se, feasible});

    int pos = n - 1;
    while (pos >= 0 && digits[pos] == num_actions - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
  return res;
}

}  // namespace gfnoma
