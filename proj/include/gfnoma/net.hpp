#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gfnoma/rng.hpp"

namespace gfnoma {

struct MlpSpec {
  int inputs = 1;
  std::vector<int> hidden = {250, 120, 64};
  int outputs = 1;

  void validate() const;
  // [inputs, hidden..., outputs]
  std::vector<int> layer_sizes() const;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Fully connected network, ReLU hidden activations, identity output, all
// double precision. Weight matrix l maps layer l to layer l+1; data is
// column-major with one sample per column.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(const MlpSpec& spec);

  // Weights uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero. Draw
  // order is fixed: per layer, column-major over the weight matrix.
  void init_params(Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
  };

  // Mean squared error over the batch, taken only on the output coordinate
  // each sample actually chose: loss = mean_k (q(a_k) - y_k)^2. Gradients for
  // every parameter are written to *g; returns the loss.
  double loss_and_gradients(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                            const Eigen::VectorXd& targets, Gradients* g) const;

  Gradients zero_gradients() const;

  int num_weight_layers() const { return static_cast<int>(w_.size()); }
  const MlpSpec& spec() const { return spec_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }
  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }

 private:
  MlpSpec spec_;
  std::vector<Eigen::MatrixXd> w_;
  std::vector<Eigen::VectorXd> b_;
};

// Standard Adam with bias correction; one shared time step per call.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const Mlp& net, const AdamConfig& cfg);

  void step(Mlp& net, const Mlp::Gradients& g);

  std::int64_t steps_taken() const { return t_; }
  void set_steps_taken(std::int64_t t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<Eigen::MatrixXd>& moment1_w() { return mw_; }
  std::vector<Eigen::MatrixXd>& moment2_w() { return vw_; }
  std::vector<Eigen::VectorXd>& moment1_b() { return mb_; }
  std::vector<Eigen::VectorXd>& moment2_b() { return vb_; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace gfnoma
