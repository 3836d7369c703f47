#pragma once

#include <cstddef>
#include <vector>

#include "gfnoma/rng.hpp"

namespace gfnoma {

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Fixed-capacity ring buffer; insertion beyond capacity evicts the oldest
// entry. Sampling is uniform with replacement over the current contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }
  bool ready(std::size_t batch_size) const { return size_ >= batch_size; }

  // i = 0 is the oldest stored experience.
  const Experience& at(std::size_t i) const;

  // Uniform indices into the logical order, with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::vector<Experience> data_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace gfnoma
