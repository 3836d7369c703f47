#include "gfnoma/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnoma {

namespace {

[[noreturn]] void bad_field(const std::string& what) {
  throw std::invalid_argument("radio config: " + what);
}

}  // namespace

void RadioConfig::validate() const {
  if (!(cell_radius_m > 0.0)) bad_field("cell_radius_m must be > 0");
  if (num_layers < 1) bad_field("num_layers must be >= 1");
  if (!(path_loss_exponent > 2.0)) bad_field("path_loss_exponent must be > 2");
  if (!(path_loss_intercept > 0.0)) bad_field("path_loss_intercept must be > 0");
  if (!(noise_power_w > 0.0)) bad_field("noise_power_w must be > 0");
  if (!(subchannel_bandwidth_hz > 0.0)) bad_field("subchannel_bandwidth_hz must be > 0");
  if (power_levels_w.empty()) bad_field("power_levels_w must be non-empty");
  for (std::size_t i = 0; i < power_levels_w.size(); ++i) {
    if (!(power_levels_w[i] > 0.0)) bad_field("power_levels_w entries must be > 0");
    if (i > 0 && !(power_levels_w[i] > power_levels_w[i - 1]))
      bad_field("power_levels_w must be strictly increasing");
  }
  if (num_power_levels() < num_layers + 1)
    bad_field("need more power levels than layers");
  if (!(p_max_w > 0.0)) bad_field("p_max_w must be > 0");
  if (power_levels_w.back() > p_max_w)
    bad_field("power_levels_w entries must not exceed p_max_w");
  if (rate_threshold < 0.0) bad_field("rate_threshold must be >= 0");
  if (rate_min < 0.0) bad_field("rate_min must be >= 0");
}

void TrafficModel::validate() const {
  if (mode == Mode::fixed) {
    if (fixed_count < 1) throw std::invalid_argument("traffic: fixed_count must be >= 1");
  } else {
    if (!(poisson_mean > 0.0)) throw std::invalid_argument("traffic: poisson_mean must be > 0");
  }
}

int TrafficModel::sample_arrivals(Rng& rng) const {
  if (mode == Mode::fixed) return fixed_count;
  // Sequential inversion. The cap only matters for u within 2^-53 of 1,
  // where the accumulated CDF can saturate below 1 in floating point.
  const double u = rng.uniform_open_closed();
  const int cap = static_cast<int>(10.0 * poisson_mean) + 100;
  double p = std::exp(-poisson_mean);
  double cdf = p;
  int n = 0;
  while (u > cdf && n < cap) {
    ++n;
    p *= poisson_mean / n;
    cdf += p;
  }
  return n;
}

double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double w_to_dbm(double w) {
  if (!(w > 0.0)) throw std::invalid_argument("w_to_dbm: power must be > 0");
  return 10.0 * std::log10(w * 1e3);
}

double poisson_pmf(int n, double mean) {
  if (n < 0) throw std::invalid_argument("poisson_pmf: n must be >= 0");
  if (!(mean > 0.0)) throw std::invalid_argument("poisson_pmf: mean must be > 0");
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

double path_loss(double distance_m, double alpha, double intercept) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss: distance must be > 0");
  return intercept * std::pow(distance_m, -alpha);
}

double sample_distance(double cell_radius_m, Rng& rng) {
  return cell_radius_m * std::sqrt(rng.uniform_open_closed());
}

double sample_ring_distance(double lo_m, double hi_m, Rng& rng) {
  if (lo_m < 0.0 || !(hi_m > lo_m))
    throw std::invalid_argument("sample_ring_distance: need 0 <= lo < hi");
  const double u = rng.uniform_open_closed();
  return std::sqrt(lo_m * lo_m + u * (hi_m * hi_m - lo_m * lo_m));
}

double sample_fading(Rng& rng) { return -std::log(rng.uniform_open_closed()); }

int layer_of(double distance_m, double cell_radius_m, int num_layers) {
  if (!(distance_m > 0.0) || distance_m > cell_radius_m)
    throw std::invalid_argument("layer_of: distance outside (0, R]");
  const double width = cell_radius_m / num_layers;
  for (int l = 1; l < num_layers; ++l) {
    if (distance_m <= width * l) return l;
  }
  return num_layers;
}

double layer_boundary(int layer, double cell_radius_m, int num_layers) {
  if (layer < 1 || layer > num_layers) throw std::invalid_argument("layer_boundary: bad layer");
  return cell_radius_m / num_layers * layer;
}

double received_power(double tx_power_w, double gain) { return tx_power_w * gain; }

Snapshot sample_snapshot(const RadioConfig& cfg, int num_users, Rng& rng) {
  Snapshot snap(num_users);
  for (int i = 0; i < num_users; ++i) {
    UserSample& u = snap[i];
    if (cfg.placement == Placement::layer_balanced) {
      u.layer = 1 + i % cfg.num_layers;
      const double lo =
          u.layer == 1 ? 0.0
                       : layer_boundary(u.layer - 1, cfg.cell_radius_m, cfg.num_layers);
      const double hi = layer_boundary(u.layer, cfg.cell_radius_m, cfg.num_layers);
      u.distance_m = sample_ring_distance(lo, hi, rng);
    } else {
      u.distance_m = sample_distance(cfg.cell_radius_m, rng);
      u.layer = layer_of(u.distance_m, cfg.cell_radius_m, cfg.num_layers);
    }
    u.fading = sample_fading(rng);
    u.gain = u.fading * path_loss(u.distance_m, cfg.path_loss_exponent, cfg.path_loss_intercept);
  }
  return snap;
}

std::string threshold_mode_name(ThresholdMode m) {
  return m == ThresholdMode::spectral ? "spectral" : "absolute";
}

std::string placement_name(Placement p) {
  return p == Placement::uniform ? "uniform" : "layer_balanced";
}

}  // namespace gfnoma
