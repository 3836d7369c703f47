#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfnoma/oracle.hpp"
#include "gfnoma/pool.hpp"
#include "gfnoma/run_config.hpp"
#include "gfnoma/run_io.hpp"
#include "gfnoma/trainer.hpp"

using namespace gfnoma;
using nlohmann::json;

namespace {

struct EndWindow {
  double reward_mean = 0.0;
  double throughput_bps_mean = 0.0;
  double reward_cov = 0.0;  // stddev/mean over the window; 0 when mean is 0
};

EndWindow end_window(const std::vector<EpisodeStats>& eps, double tail_fraction) {
  const int total = static_cast<int>(eps.size());
  const int window = std::max(1, static_cast<int>(std::floor(tail_fraction * total + 1e-9)));
  EndWindow w;
  for (int i = total - window; i < total; ++i) {
    w.reward_mean += eps[i].reward_sum;
    w.throughput_bps_mean += eps[i].admitted_rate_bps;
  }
  w.reward_mean /= window;
  w.throughput_bps_mean /= window;
  double var = 0.0;
  for (int i = total - window; i < total; ++i) {
    const double d = eps[i].reward_sum - w.reward_mean;
    var += d * d;
  }
  var /= window;
  w.reward_cov = w.reward_mean != 0.0 ? std::sqrt(var) / w.reward_mean : 0.0;
  return w;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_single_run(const RunConfig& cfg, std::uint64_t seed, const std::string& dir,
                      const TrainingResult& result) {
  const RunPaths paths = run_paths(dir);
  ensure_dir(paths.dir);
  ensure_dir(paths.checkpoints_dir);
  write_metrics_csv(paths.metrics_csv, result.episodes);
  write_throughput_csv(paths.throughput_csv, result.episodes);
  write_steps_csv(paths.steps_csv, result.steps);
  write_run_meta(paths.run_meta, cfg, seed, "train", result.num_users);
  for (std::size_t i = 0; i < result.agents.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "agent_%03zu.bin", i);
    save_agent_checkpoint(result.agents[i], paths.checkpoints_dir + "/" + name);
  }
  try {
    RunConfig echo = cfg;
    echo.seed = seed;
    const PowerPool pool =
        extract_pool(result.steps, static_cast<int>(result.episodes.size()), cfg.env,
                     cfg.tail_fraction,
                     cfg.agent.algorithm == Algorithm::dqn ? "dqn" : "ddqn");
    write_pool_json(paths.pool_json, pool, echo);
  } catch (const IncompletePoolError& e) {
    log_info(std::string("pool extraction skipped: ") + e.what());
  }
}

int cmd_train(const RunConfig& cfg) {
  const int replicates = cfg.replicates;
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::vector<std::string> errors;

  const auto worker = [&] {
    for (int k = next.fetch_add(1); k < replicates; k = next.fetch_add(1)) {
      try {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
        std::string dir = cfg.output_dir;
        if (replicates > 1) {
          char sub[16];
          std::snprintf(sub, sizeof(sub), "/rep%03d", k);
          dir += sub;
        }
        log_info("training replicate " + std::to_string(k) + " (seed " +
                 std::to_string(seed) + ") -> " + dir);
        const TrainingResult result =
            run_training(cfg.env, cfg.agent, cfg.episodes, seed);
        write_single_run(cfg, seed, dir, result);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.emplace_back(e.what());
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int num_workers = std::min<int>(replicates, static_cast<int>(hw));
  if (num_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < num_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (!errors.empty()) throw std::runtime_error(errors.front());
  return 0;
}

struct CompareArm {
  std::string name;
  RunConfig cfg;
};

std::vector<CompareArm> build_arms(const RunConfig& base) {
  std::vector<CompareArm> arms;
  const std::string& mode = base.compare.mode;
  if (mode == "dqn_vs_ddqn") {
    CompareArm dqn{"dqn", base}, ddqn{"ddqn", base};
    dqn.cfg.agent.algorithm = Algorithm::dqn;
    ddqn.cfg.agent.algorithm = Algorithm::ddqn;
    arms = {dqn, ddqn};
  } else if (mode == "noma_vs_oma") {
    CompareArm noma{"noma", base}, oma{"oma", base};
    noma.cfg.env.access_mode = AccessMode::noma;
    oma.cfg.env.access_mode = AccessMode::oma;
    arms = {noma, oma};
  } else if (mode == "pool_vs_fixed") {
    CompareArm pool{"pool", base}, fixed{"fixed", base};
    pool.cfg.env.power_mode = PowerMode::pool_search;
    fixed.cfg.env.power_mode = PowerMode::fixed;
    if (fixed.cfg.env.fixed_level_index < 0)
      fixed.cfg.env.fixed_level_index = fixed.cfg.env.radio.num_power_levels() - 1;
    arms = {pool, fixed};
  } else if (mode == "pmax_sweep") {
    for (const double p : base.compare.pmax_values_w) {
      CompareArm arm{"pmax_" + format_double(p), base};
      arm.cfg.env.radio.p_max_w = p;
      arms.push_back(std::move(arm));
    }
  } else if (mode == "lr_sweep") {
    for (const double lr : base.compare.lr_values) {
      CompareArm arm{"lr_" + format_double(lr), base};
      arm.cfg.agent.adam.learning_rate = lr;
      arms.push_back(std::move(arm));
    }
  } else {  // subchannel_sweep
    const bool split = base.compare.bandwidth_mode != "per_subchannel";
    const bool full = base.compare.bandwidth_mode != "split";
    for (const int m : base.compare.subchannel_values) {
      if (split) {
        CompareArm arm{"M" + std::to_string(m) + "_split", base};
        arm.cfg.env.num_subchannels = m;
        arm.cfg.env.radio.subchannel_bandwidth_hz = base.compare.total_bandwidth_hz / m;
        arms.push_back(std::move(arm));
      }
      if (full) {
        CompareArm arm{"M" + std::to_string(m) + "_full", base};
        arm.cfg.env.num_subchannels = m;
        arms.push_back(std::move(arm));
      }
    }
  }
  return arms;
}

int cmd_compare(const RunConfig& base) {
  const std::vector<CompareArm> arms = build_arms(base);
  ensure_dir(base.output_dir);

  std::string curves =
      "arm,seed,episode,sum_reward,mean_loss,epsilon,sum_rate_se,sum_rate_bps,"
      "admitted_rate_bps\n";
  // per arm, per seed end-window stats
  json per_seed = json::array();
  std::vector<std::vector<EndWindow>> windows(arms.size());

  for (std::size_t s = 0; s < base.compare.seeds.size(); ++s) {
    const std::uint64_t seed = base.compare.seeds[s];
    json seed_entry = {{"seed", seed}};
    for (std::size_t a = 0; a < arms.size(); ++a) {
      log_info("compare arm '" + arms[a].name + "' seed " + std::to_string(seed));
      const TrainingResult result =
          run_training(arms[a].cfg.env, arms[a].cfg.agent, arms[a].cfg.episodes, seed);
      for (const auto& e : result.episodes) {
        curves += arms[a].name + "," + std::to_string(seed) + "," +
                  std::to_string(e.episode) + "," + format_double(e.reward_sum) + "," +
                  format_double(e.mean_loss) + "," + format_double(e.epsilon) + "," +
                  format_double(e.sum_rate_se) + "," + format_double(e.sum_rate_bps) +
                  "," + format_double(e.admitted_rate_bps) + "\n";
      }
      const EndWindow w = end_window(result.episodes, base.tail_fraction);
      windows[a].push_back(w);
      seed_entry[arms[a].name] = {{"end_reward_mean", w.reward_mean},
                                  {"end_throughput_bps_mean", w.throughput_bps_mean},
                                  {"reward_cov", w.reward_cov}};
    }
    per_seed.push_back(std::move(seed_entry));
  }

  json summary = {{"mode", base.compare.mode},
                  {"tail_fraction", base.tail_fraction},
                  {"config_sha1", sha1_hex(run_config_to_json(base))},
                  {"per_seed", per_seed}};
  json arm_names = json::array();
  for (const auto& arm : arms) arm_names.push_back(arm.name);
  summary["arms"] = arm_names;

  json medians;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    std::vector<double> rewards, throughputs;
    for (const auto& w : windows[a]) {
      rewards.push_back(w.reward_mean);
      throughputs.push_back(w.throughput_bps_mean);
    }
    medians[arms[a].name] = {{"end_reward_mean", median(rewards)},
                             {"end_throughput_bps_mean", median(throughputs)}};
  }
  summary["median_by_arm"] = medians;

  if (arms.size() == 2) {
    // pairwise ratio per seed: arm[0] over arm[1] on the mode's headline metric
    const bool reward_metric = base.compare.mode == "dqn_vs_ddqn";
    json ratios = json::array();
    int wins = 0;
    std::vector<double> ratio_values;
    for (std::size_t s = 0; s < base.compare.seeds.size(); ++s) {
      const EndWindow& lead = windows[base.compare.mode == "dqn_vs_ddqn" ? 1 : 0][s];
      const EndWindow& ref = windows[base.compare.mode == "dqn_vs_ddqn" ? 0 : 1][s];
      const double num = reward_metric ? lead.reward_mean : lead.throughput_bps_mean;
      const double den = reward_metric ? ref.reward_mean : ref.throughput_bps_mean;
      if (num >= den) ++wins;
      if (den > 0.0) {
        ratios.push_back(num / den);
        ratio_values.push_back(num / den);
      } else {
        ratios.push_back(nullptr);
      }
    }
    summary["ratio_metric"] = reward_metric
                                  ? "ddqn end_reward_mean over dqn"
                                  : arms[0].name + " end_throughput_bps_mean over " +
                                        arms[1].name;
    summary["per_seed_ratio"] = ratios;
    summary["wins"] = wins;
    if (!ratio_values.empty()) summary["median_ratio"] = median(ratio_values);
  }

  write_text_file(base.output_dir + "/comparison.csv", curves);
  write_text_file(base.output_dir + "/summary.json", summary.dump(2) + "\n");
  log_info("comparison written to " + base.output_dir);
  return 0;
}

int cmd_oracle_check(const RunConfig& cfg) {
  ensure_dir(cfg.output_dir);
  log_info("training policy for oracle comparison (seed " + std::to_string(cfg.seed) +
           ")");
  const TrainingResult result = run_training(cfg.env, cfg.agent, cfg.episodes, cfg.seed);

  // Snapshot stream decoupled from the training stream so the comparison set
  // is stable under training changes.
  Rng snap_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  EnvConfig raw = cfg.env;
  raw.reward_mode = RewardMode::raw;

  std::string csv = "snapshot,greedy_sum_rate_se,oracle_sum_rate_se,ratio\n";
  std::vector<double> ratios;
  int infeasible = 0;
  for (int i = 0; i < cfg.oracle.num_snapshots; ++i) {
    const Snapshot snap =
        sample_snapshot(cfg.env.radio, result.num_users, snap_rng);
    const OracleResult oracle = exhaustive_best(raw, snap, cfg.oracle.budget);
    if (!oracle.feasible_found || oracle.best_sum_rate_se <= 0.0) {
      ++infeasible;
      csv += std::to_string(i) + ",,,\n";
      continue;
    }
    const double greedy =
        greedy_sum_rate(result.agents, raw, snap, cfg.oracle.rollout_steps);
    const double ratio = greedy / oracle.best_sum_rate_se;
    ratios.push_back(ratio);
    csv += std::to_string(i) + "," + format_double(greedy) + "," +
           format_double(oracle.best_sum_rate_se) + "," + format_double(ratio) + "\n";
  }

  json report = {{"snapshots", cfg.oracle.num_snapshots},
                 {"skipped_infeasible", infeasible},
                 {"seed", cfg.seed},
                 {"config_sha1", sha1_hex(run_config_to_json(cfg))}};
  if (!ratios.empty()) {
    report["median_ratio"] = median(ratios);
    report["min_ratio"] = *std::min_element(ratios.begin(), ratios.end());
    report["max_ratio"] = *std::max_element(ratios.begin(), ratios.end());
  }
  write_text_file(cfg.output_dir + "/oracle_check.csv", csv);
  write_text_file(cfg.output_dir + "/oracle_check.json", report.dump(2) + "\n");
  if (!ratios.empty())
    log_info("oracle check median ratio " + format_double(report["median_ratio"]));
  return 0;
}

int cmd_extract_pool(const std::string& run_dir, const std::string& out_dir,
                     double tail_override) {
  const RunPaths paths = run_paths(run_dir);
  const json meta = json::parse(read_text_file(paths.run_meta));
  RunConfig cfg = parse_run_config(meta.at("config").dump(), paths.run_meta);
  cfg.seed = meta.at("seed").get<std::uint64_t>();
  const double tail = tail_override > 0.0 ? tail_override : cfg.tail_fraction;

  const std::vector<StepRecord> steps = read_steps_csv(paths.steps_csv);
  int episodes = 0;
  for (const auto& s : steps) episodes = std::max(episodes, s.episode);
  const PowerPool pool =
      extract_pool(steps, episodes, cfg.env, tail,
                   cfg.agent.algorithm == Algorithm::dqn ? "dqn" : "ddqn");

  const std::string dest_dir = out_dir.empty() ? run_dir : out_dir;
  ensure_dir(dest_dir);
  write_pool_json(dest_dir + "/pool.json", pool, cfg);
  log_info("pool written to " + dest_dir + "/pool.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grant-free NOMA uplink simulator with multi-agent DQN/DDQN training"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir;
  std::uint64_t seed = 0;
  int replicates = 0;
  double tail = 0.0;

  const auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_option("--out", out_dir, "override run.output_dir");
    sub->add_option("--replicates", replicates, "override run.replicates");
  };

  CLI::App* train = app.add_subcommand("train", "train agents and write a run directory");
  add_common(train, true);
  CLI::App* compare =
      app.add_subcommand("compare", "run a paired comparison or sweep");
  add_common(compare, true);
  CLI::App* extract =
      app.add_subcommand("extract-pool", "re-extract pool.json from a run directory");
  add_common(extract, false);
  extract->add_option("--run", run_dir, "run directory holding steps.csv and run_meta.json");
  extract->add_option("--tail", tail, "tail fraction override");
  CLI::App* oracle_check = app.add_subcommand(
      "oracle-check", "compare a trained greedy policy against exhaustive search");
  add_common(oracle_check, true);

  try {
    app.parse(argc, argv);

    const auto load = [&](CLI::App* sub) {
      RunConfig cfg = load_run_config(config_path);
      if (sub->count("--seed") > 0) cfg.seed = seed;
      if (sub->count("--out") > 0) cfg.output_dir = out_dir;
      if (sub->count("--replicates") > 0) cfg.replicates = replicates;
      cfg.validate();
      return cfg;
    };

    if (train->parsed()) return cmd_train(load(train));
    if (compare->parsed()) return cmd_compare(load(compare));
    if (oracle_check->parsed()) return cmd_oracle_check(load(oracle_check));
    if (extract->parsed()) {
      std::string dir = run_dir;
      if (dir.empty()) {
        if (config_path.empty())
          throw ConfigError("extract-pool needs --run or --config");
        dir = load_run_config(config_path).output_dir;
      }
      return cmd_extract_pool(dir, extract->count("--out") > 0 ? out_dir : "",
                              extract->count("--tail") > 0 ? tail : 0.0);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
