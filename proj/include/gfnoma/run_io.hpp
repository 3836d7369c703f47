#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfnoma/agent.hpp"
#include "gfnoma/pool.hpp"
#include "gfnoma/run_config.hpp"
#include "gfnoma/trainer.hpp"

namespace gfnoma {

// Log level from GFNOMA_LOG: quiet, info (default), debug. Messages go to
// stderr so stdout stays machine-readable.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

std::string sha1_hex(const std::string& bytes);

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Shortest stable decimal form: %.17g round-trips doubles exactly, so CSV
// bytes are a pure function of the run.
std::string format_double(double v);

// header pinned: episode,sum_reward,mean_loss,epsilon,violations_10b,
// violations_10d,violations_10e
void write_metrics_csv(const std::string& path, const std::vector<EpisodeStats>& eps);
// per-episode throughput companion: episode,sum_rate_se,sum_rate_bps
void write_throughput_csv(const std::string& path, const std::vector<EpisodeStats>& eps);
// per-slot actions and geometry; integer lists ';'-joined
void write_steps_csv(const std::string& path, const std::vector<StepRecord>& steps);
std::vector<StepRecord> read_steps_csv(const std::string& path);

void write_pool_json(const std::string& path, const PowerPool& pool,
                     const RunConfig& cfg);

// Network checkpoint: 4-byte little-endian header length, JSON header (layer
// sizes, adam step, array manifest), then little-endian f64 arrays
// column-major in manifest order (online weights/biases, target
// weights/biases).
void save_agent_checkpoint(const Agent& agent, const std::string& path);
// Shapes must match the agent's networks.
void load_agent_checkpoint(Agent& agent, const std::string& path);

struct RunPaths {
  std::string dir;
  std::string metrics_csv;
  std::string throughput_csv;
  std::string steps_csv;
  std::string run_meta;
  std::string pool_json;
  std::string checkpoints_dir;
};
RunPaths run_paths(const std::string& dir);

void write_run_meta(const std::string& path, const RunConfig& cfg,
                    std::uint64_t seed, const std::string& command, int num_users);

}  // namespace gfnoma
