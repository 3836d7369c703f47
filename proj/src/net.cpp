#include "gfnoma/net.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnoma {

void MlpSpec::validate() const {
  if (inputs < 1) throw std::invalid_argument("mlp: inputs must be >= 1");
  if (outputs < 1) throw std::invalid_argument("mlp: outputs must be >= 1");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("mlp: hidden sizes must be >= 1");
}

std::vector<int> MlpSpec::layer_sizes() const {
  std::vector<int> s;
  s.push_back(inputs);
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(outputs);
  return s;
}

Mlp::Mlp(const MlpSpec& spec) : spec_(spec) {
  spec_.validate();
  const auto sizes = spec_.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    w_.emplace_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
    b_.emplace_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
}

void Mlp::init_params(Rng& rng) {
  for (auto& w : w_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        w(r, c) = (2.0 * rng.uniform_half_open() - 1.0) * bound;
  }
  for (auto& b : b_) b.setZero();
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward_batch(x).col(0);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.rows() != spec_.inputs) throw std::invalid_argument("mlp: input size mismatch");
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::MatrixXd z = (w_[l] * a).colwise() + b_[l];
    if (l + 1 < w_.size())
      a = z.cwiseMax(0.0);
    else
      a = std::move(z);
  }
  return a;
}

double Mlp::loss_and_gradients(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                               const Eigen::VectorXd& targets, Gradients* g) const {
  const Eigen::Index batch = x.cols();
  if (static_cast<Eigen::Index>(actions.size()) != batch || targets.size() != batch)
    throw std::invalid_argument("mlp: batch size mismatch");
  if (x.rows() != spec_.inputs) throw std::invalid_argument("mlp: input size mismatch");

  const std::size_t layers = w_.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  std::vector<Eigen::MatrixXd> pre(layers);
  acts[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l] = (w_[l] * acts[l]).colwise() + b_[l];
    acts[l + 1] = (l + 1 < layers) ? pre[l].cwiseMax(0.0) : pre[l];
  }
  const Eigen::MatrixXd& q = acts[layers];

  double loss = 0.0;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), batch);
  for (Eigen::Index k = 0; k < batch; ++k) {
    const int a = actions[static_cast<std::size_t>(k)];
    if (a < 0 || a >= q.rows()) throw std::invalid_argument("mlp: action index out of range");
    const double err = q(a, k) - targets(k);
    loss += err * err;
    delta(a, k) = 2.0 * err / static_cast<double>(batch);
  }
  loss /= static_cast<double>(batch);

  if (g != nullptr) {
    g->w.resize(layers);
    g->b.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
      g->w[l] = delta * acts[l].transpose();
      g->b[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = (w_[l].transpose() * delta).array() *
                (pre[l - 1].array() > 0.0).cast<double>();
      }
    }
  }
  return loss;
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (const auto& w : w_) g.w.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : b_) g.b.emplace_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

AdamOptimizer::AdamOptimizer(const Mlp& net, const AdamConfig& cfg) : cfg_(cfg) {
  for (const auto& w : net.weights()) {
    mw_.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    vw_.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases()) {
    mb_.emplace_back(Eigen::VectorXd::Zero(b.size()));
    vb_.emplace_back(Eigen::VectorXd::Zero(b.size()));
  }
}

void AdamOptimizer::step(Mlp& net, const Mlp::Gradients& g) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t l = 0; l < mw_.size(); ++l) {
    mw_[l] = cfg_.beta1 * mw_[l] + (1.0 - cfg_.beta1) * g.w[l];
    vw_[l] = cfg_.beta2 * vw_[l].array() + (1.0 - cfg_.beta2) * g.w[l].array().square();
    net.weights()[l].array() -=
        cfg_.learning_rate * (mw_[l].array() / c1) /
        ((vw_[l].array() / c2).sqrt() + cfg_.epsilon);
    mb_[l] = cfg_.beta1 * mb_[l] + (1.0 - cfg_.beta1) * g.b[l];
    vb_[l] = cfg_.beta2 * vb_[l].array() + (1.0 - cfg_.beta2) * g.b[l].array().square();
    net.biases()[l].array() -=
        cfg_.learning_rate * (mb_[l].array() / c1) /
        ((vb_[l].array() / c2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace gfnoma
