#include "thermocal/forward_model.hpp"

#include <bit>

namespace thermocal {

ForwardModel::ForwardModel(ForcingMatrix forcing, CellGeometry geom, int block_count,
                           double initial_power, std::size_t cache_capacity)
    : forcing_(std::move(forcing)),
      geom_(geom),
      plan_(forcing_, geom_),
      block_count_(block_count),
      initial_power_(initial_power),
      capacity_(cache_capacity) {
  forcing_.validate();
  geom_.validate();
  block_sizes(forcing_.size(), block_count_);  // throws on an invalid grid
}

std::size_t ForwardModel::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t word : k.bits) {
    h ^= word + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

ForwardModel::Key ForwardModel::key_of(const ParameterVector& theta) noexcept {
  Key k{};
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    // +0.0 and -0.0 simulate identically; fold them onto one key.
    const double v = theta[i] == 0.0 ? 0.0 : theta[i];
    k.bits[i] = std::bit_cast<std::uint64_t>(v);
  }
  return k;
}

std::shared_ptr<const Series> ForwardModel::lookup(const ParameterVector& theta) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key_of(theta));
  return it == cache_.end() ? nullptr : it->second;
}

void ForwardModel::remember(const ParameterVector& theta,
                            std::shared_ptr<const Series> prediction) const {
  if (!prediction) return;
  std::lock_guard lock(mutex_);
  if (cache_.size() >= capacity_) return;
  cache_.try_emplace(key_of(theta), std::move(prediction));
}

std::shared_ptr<const Series> ForwardModel::averaged(const ParameterVector& theta) const {
  if (auto hit = lookup(theta)) return hit;
  auto result = std::make_shared<const Series>(
      block_average(trajectory(theta).powers, block_count_));
  remember(theta, result);
  return result;
}

PredictionSeries ForwardModel::trajectory(const ParameterVector& theta) const {
  simulations_.fetch_add(1, std::memory_order_relaxed);
  return plan_.run(theta, initial_power_);
}

std::size_t ForwardModel::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace thermocal
