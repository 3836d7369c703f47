#include "gfnoma/run_io.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace gfnoma {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "gfnoma 1.0.0";

std::uint32_t rotl(std::uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

}  // namespace

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* v = std::getenv("GFNOMA_LOG");
    if (v == nullptr) return LogLevel::info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return LogLevel::quiet;
    if (s == "debug" || s == "2") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[gfnoma] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[gfnoma] " << msg << "\n";
}

std::string sha1_hex(const std::string& bytes) {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                        0xC3D2E1F0u};
  std::string msg = bytes;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(bytes.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

  for (std::size_t off = 0; off < msg.size(); off += 64) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i])) << 24) |
             (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 1])) << 16) |
             (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 2])) << 8) |
             static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 3]));
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t temp = rotl(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rotl(b, 30);
      b = a;
      a = temp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  char out[41];
  std::snprintf(out, sizeof(out), "%08x%08x%08x%08x%08x", h[0], h[1], h[2], h[3], h[4]);
  return std::string(out);
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + path + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_metrics_csv(const std::string& path, const std::vector<EpisodeStats>& eps) {
  std::string out =
      "episode,sum_reward,mean_loss,epsilon,violations_10b,violations_10d,"
      "violations_10e\n";
  for (const auto& e : eps) {
    out += std::to_string(e.episode) + "," + format_double(e.reward_sum) + "," +
           format_double(e.mean_loss) + "," + format_double(e.epsilon) + "," +
           std::to_string(e.budget_violations) + "," +
           std::to_string(e.occupancy_violations) + "," +
           std::to_string(e.rate_violations) + "\n";
  }
  write_text_file(path, out);
}

void write_throughput_csv(const std::string& path, const std::vector<EpisodeStats>& eps) {
  std::string out = "episode,sum_rate_se,sum_rate_bps,admitted_rate_se,admitted_rate_bps\n";
  for (const auto& e : eps) {
    out += std::to_string(e.episode) + "," + format_double(e.sum_rate_se) + "," +
           format_double(e.sum_rate_bps) + "," + format_double(e.admitted_rate_se) +
           "," + format_double(e.admitted_rate_bps) + "\n";
  }
  write_text_file(path, out);
}

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> v;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(';', pos);
    if (next == std::string::npos) next = s.size();
    v.push_back(std::stoi(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

}  // namespace

void write_steps_csv(const std::string& path, const std::vector<StepRecord>& steps) {
  std::string out =
      "episode,step,sum_rate_se,reward,gate_passed,layers,power_indices,"
      "subchannels\n";
  for (const auto& s : steps) {
    out += std::to_string(s.episode) + "," + std::to_string(s.step) + "," +
           format_double(s.sum_rate_se) + "," + format_double(s.reward) + "," +
           (s.gate_passed ? "1" : "0") + "," + join_ints(s.layer) + "," +
           join_ints(s.power_index) + "," + join_ints(s.subchannel) + "\n";
  }
  write_text_file(path, out);
}

std::vector<StepRecord> read_steps_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      line != "episode,step,sum_rate_se,reward,gate_passed,layers,power_indices,subchannels")
    throw std::runtime_error("steps csv '" + path + "': unexpected header");
  std::vector<StepRecord> steps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8)
      throw std::runtime_error("steps csv '" + path + "': malformed row");
    StepRecord r;
    r.episode = std::stoi(f[0]);
    r.step = std::stoi(f[1]);
    r.sum_rate_se = std::stod(f[2]);
    r.reward = std::stod(f[3]);
    r.gate_passed = f[4] == "1";
    r.layer = split_ints(f[5]);
    r.power_index = split_ints(f[6]);
    r.subchannel = split_ints(f[7]);
    steps.push_back(std::move(r));
  }
  return steps;
}

void write_pool_json(const std::string& path, const PowerPool& pool,
                     const RunConfig& cfg) {
  json layers;
  for (std::size_t l = 0; l < pool.level_index.size(); ++l) {
    layers[std::to_string(l + 1)] = {{"level_w", pool.level_w[l]},
                                     {"level_index", pool.level_index[l]},
                                     {"frequency_table", pool.counts[l]}};
  }
  const std::string cfg_json = run_config_to_json(cfg);
  json root = {{"layers", layers},
               {"metadata",
                {{"algorithm", pool.algorithm},
                 {"episodes_analyzed", pool.episodes_analyzed},
                 {"first_episode", pool.first_episode},
                 {"tail_fraction", pool.tail_fraction},
                 {"seed", cfg.seed},
                 {"config_sha1", sha1_hex(cfg_json)},
                 {"version", kVersion}}}};
  write_text_file(path, root.dump(2) + "\n");
}

namespace {

void append_matrix(std::string& blob, json& manifest, const std::string& name,
                   const Eigen::MatrixXd& m) {
  manifest.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  const char* p = reinterpret_cast<const char*>(m.data());
  blob.append(p, sizeof(double) * static_cast<std::size_t>(m.size()));
}

void read_matrix(const std::string& blob, std::size_t& off, Eigen::MatrixXd& m,
                 std::int64_t rows, std::int64_t cols) {
  const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(rows * cols);
  if (off + bytes > blob.size())
    throw std::runtime_error("checkpoint: truncated array data");
  m.resize(rows, cols);
  std::memcpy(m.data(), blob.data() + off, bytes);
  off += bytes;
}

}  // namespace

void save_agent_checkpoint(const Agent& agent, const std::string& path) {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native != std::endian::little)
    throw std::runtime_error("checkpoint format requires a little-endian host");

  json manifest = json::array();
  std::string blob;
  const auto add_net = [&](const Mlp& net, const std::string& prefix) {
    for (int l = 0; l < net.num_weight_layers(); ++l) {
      append_matrix(blob, manifest, prefix + "_w" + std::to_string(l), net.weights()[l]);
      append_matrix(blob, manifest, prefix + "_b" + std::to_string(l),
                    net.biases()[l]);
    }
  };
  add_net(agent.online(), "online");
  add_net(agent.target(), "target");

  json header = {{"format", 1},
                 {"layer_sizes", agent.online().spec().layer_sizes()},
                 {"adam_steps", agent.optimizer().steps_taken()},
                 {"order", "col"},
                 {"arrays", manifest}};
  const std::string hdr = header.dump();
  std::string out;
  const std::uint32_t len = static_cast<std::uint32_t>(hdr.size());
  out.push_back(static_cast<char>(len & 0xff));
  out.push_back(static_cast<char>((len >> 8) & 0xff));
  out.push_back(static_cast<char>((len >> 16) & 0xff));
  out.push_back(static_cast<char>((len >> 24) & 0xff));
  out += hdr;
  out += blob;
  write_text_file(path, out);
}

void load_agent_checkpoint(Agent& agent, const std::string& path) {
  const std::string raw = read_text_file(path);
  if (raw.size() < 4) throw std::runtime_error("checkpoint: file too short");
  const std::uint32_t len =
      static_cast<std::uint32_t>(static_cast<unsigned char>(raw[0])) |
      (static_cast<std::uint32_t>(static_cast<unsigned char>(raw[1])) << 8) |
      (static_cast<std::uint32_t>(static_cast<unsigned char>(raw[2])) << 16) |
      (static_cast<std::uint32_t>(static_cast<unsigned char>(raw[3])) << 24);
  if (raw.size() < 4 + static_cast<std::size_t>(len))
    throw std::runtime_error("checkpoint: truncated header");
  json header = json::parse(raw.substr(4, len));
  if (header.at("format").get<int>() != 1)
    throw std::runtime_error("checkpoint: unsupported format");
  const auto sizes = header.at("layer_sizes").get<std::vector<int>>();
  if (sizes != agent.online().spec().layer_sizes())
    throw std::runtime_error("checkpoint: layer sizes do not match the agent");

  const std::string blob = raw.substr(4 + len);
  std::size_t off = 0;
  auto arrays = header.at("arrays");
  std::size_t idx = 0;
  const auto read_net = [&](Mlp& net, const std::string& prefix) {
    for (int l = 0; l < net.num_weight_layers(); ++l) {
      for (const std::string suffix : {"_w" + std::to_string(l), "_b" + std::to_string(l)}) {
        const auto& entry = arrays.at(idx++);
        if (entry.at("name").get<std::string>() != prefix + suffix)
          throw std::runtime_error("checkpoint: unexpected array order");
        Eigen::MatrixXd m;
        read_matrix(blob, off, m, entry.at("rows").get<std::int64_t>(),
                    entry.at("cols").get<std::int64_t>());
        if (suffix[1] == 'w') {
          if (m.rows() != net.weights()[l].rows() || m.cols() != net.weights()[l].cols())
            throw std::runtime_error("checkpoint: weight shape mismatch");
          net.weights()[l] = m;
        } else {
          if (m.rows() != net.biases()[l].rows() || m.cols() != 1)
            throw std::runtime_error("checkpoint: bias shape mismatch");
          net.biases()[l] = m.col(0);
        }
      }
    }
  };
  read_net(agent.online(), "online");
  read_net(agent.target(), "target");
  agent.optimizer().set_steps_taken(header.at("adam_steps").get<std::int64_t>());
}

RunPaths run_paths(const std::string& dir) {
  RunPaths p;
  p.dir = dir;
  p.metrics_csv = dir + "/metrics.csv";
  p.throughput_csv = dir + "/throughput.csv";
  p.steps_csv = dir + "/steps.csv";
  p.run_meta = dir + "/run_meta.json";
  p.pool_json = dir + "/pool.json";
  p.checkpoints_dir = dir + "/checkpoints";
  return p;
}

void write_run_meta(const std::string& path, const RunConfig& cfg,
                    std::uint64_t seed, const std::string& command, int num_users) {
  const std::string cfg_json = run_config_to_json(cfg);
  json root = {{"version", kVersion},
               {"command", command},
               {"seed", seed},
               {"num_users", num_users},
               {"config_sha1", sha1_hex(cfg_json)},
               {"config", json::parse(cfg_json)}};
  write_text_file(path, root.dump(2) + "\n");
}

}  // namespace gfnoma
