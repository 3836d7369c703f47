#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfnoma/env.hpp"

namespace gfnoma {

class EnumerationBudgetError : public std::runtime_error {
 public:
  explicit EnumerationBudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleEntry {
  std::vector<int> flat_actions;  // per user
  double sum_rate_se = 0.0;
  bool feasible = false;
};

struct OracleResult {
  bool feasible_found = false;
  double best_sum_rate_se = 0.0;
  JointAction best_action;          // empty when no joint action is feasible
  std::vector<int> best_flat;       // flat per-user indices of best_action
  std::uint64_t evaluated = 0;
  std::vector<OracleEntry> table;   // filled only when requested
};

// Enumerates every joint action on a frozen snapshot through the same
// evaluation path as the environment step and returns the feasible sum-rate
// maximizer. Ties go to the lexicographically smallest per-user flat action
// vector. Throws EnumerationBudgetError when the joint space exceeds budget.
OracleResult exhaustive_best(const EnvConfig& cfg, const Snapshot& snap,
                             std::uint64_t budget = 10'000'000,
                             bool keep_table = false);

}  // namespace gfnoma
