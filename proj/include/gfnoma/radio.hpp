#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfnoma/rng.hpp"

namespace gfnoma {

// Units: watts, meters, Hz. Rates are tracked both as spectral efficiency
// (bits/s/Hz) and absolute (bits/s); which one the decode thresholds compare
// against is selected by threshold_mode.
enum class ThresholdMode { spectral, absolute };

// uniform: users land anywhere in the disk, so inner rings are rarely
// populated (ring area grows with radius). layer_balanced: user i is pinned
// to ring 1 + i % L and placed area-uniformly inside it, guaranteeing every
// ring is represented whenever the user count reaches L.
enum class Placement { uniform, layer_balanced };

struct RadioConfig {
  double cell_radius_m = 1000.0;
  int num_layers = 4;
  Placement placement = Placement::uniform;
  double path_loss_exponent = 4.0;
  double path_loss_intercept = 1.0;
  double noise_power_w = 1e-12;
  double subchannel_bandwidth_hz = 10e3;
  double carrier_frequency_hz = 10e6;  // recorded in outputs, not used in math
  std::vector<double> power_levels_w = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 0.9};
  double p_max_w = 1.0;
  double rate_threshold = 10.0;  // SIC decode gate
  double rate_min = 10.0;        // per-user service floor
  ThresholdMode threshold_mode = ThresholdMode::spectral;

  int num_power_levels() const { return static_cast<int>(power_levels_w.size()); }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TrafficModel {
  enum class Mode { fixed, poisson };
  Mode mode = Mode::fixed;
  int fixed_count = 6;
  double poisson_mean = 6.0;

  void validate() const;
  int sample_arrivals(Rng& rng) const;
};

// One user's draw of geometry and small-scale fading for a slot.
struct UserSample {
  double distance_m = 0.0;
  int layer = 0;        // 1-based ring index
  double fading = 0.0;  // |h|^2, unit-mean exponential
  double gain = 0.0;    // fading * path loss
};

using Snapshot = std::vector<UserSample>;

double dbm_to_w(double dbm);
double w_to_dbm(double w);

// P(N = n) for N ~ Poisson(mean).
double poisson_pmf(int n, double mean);

// Intercept * r^(-alpha).
double path_loss(double distance_m, double alpha, double intercept);

// Inverse-CDF draw from density 2r/R^2 on (0, R].
double sample_distance(double cell_radius_m, Rng& rng);

// Area-uniform draw from the annulus (lo, hi]: r = sqrt(lo^2 + u(hi^2 - lo^2)).
double sample_ring_distance(double lo_m, double hi_m, Rng& rng);

// Unit-mean exponential via -ln(u), u in (0, 1].
double sample_fading(Rng& rng);

// Smallest l in 1..L with r <= (R/L)*l. Requires 0 < r <= R.
int layer_of(double distance_m, double cell_radius_m, int num_layers);

// Outer radius of ring l.
double layer_boundary(int layer, double cell_radius_m, int num_layers);

double received_power(double tx_power_w, double gain);

// Draws distance then fading for each user in index order.
Snapshot sample_snapshot(const RadioConfig& cfg, int num_users, Rng& rng);

std::string threshold_mode_name(ThresholdMode m);
std::string placement_name(Placement p);

}  // namespace gfnoma
