#include "gfnoma/replay.hpp"

#include <stdexcept>
#include <utility>

namespace gfnoma {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : data_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay: capacity must be >= 1");
}

void ReplayBuffer::push(Experience e) {
  data_[next_] = std::move(e);
  next_ = (next_ + 1) % data_.size();
  if (size_ < data_.size()) ++size_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay: index past size");
  const std::size_t oldest = (next_ + data_.size() - size_) % data_.size();
  return data_[(oldest + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("replay: sampling from empty buffer");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.below(static_cast<std::uint32_t>(size_));
  return idx;
}

}  // namespace gfnoma
