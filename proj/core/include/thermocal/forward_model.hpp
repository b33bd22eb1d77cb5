#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "thermocal/thermal_cell.hpp"

namespace thermocal {

// Simulator context shared by calibration, validation and sensitivity:
// forcing + geometry + averaging grid, with a thread-safe memo of averaged
// predictions keyed on the exact bit pattern of theta. Concurrent misses on
// the same theta may both simulate; both store identical values.
class ForwardModel {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  ForwardModel(ForcingMatrix forcing, CellGeometry geom, int block_count,
               double initial_power = 0.0, std::size_t cache_capacity = kUnbounded);

  ForwardModel(const ForwardModel&) = delete;
  ForwardModel& operator=(const ForwardModel&) = delete;

  // Block-averaged prediction, memoized.
  std::shared_ptr<const Series> averaged(const ParameterVector& theta) const;

  // Full-resolution trajectory; never cached.
  PredictionSeries trajectory(const ParameterVector& theta) const;

  // Inserts a prediction computed elsewhere (e.g. loaded from disk).
  void remember(const ParameterVector& theta, std::shared_ptr<const Series> prediction) const;

  std::shared_ptr<const Series> lookup(const ParameterVector& theta) const;

  std::size_t simulation_count() const noexcept { return simulations_.load(); }
  std::size_t cache_size() const;

  const ForcingMatrix& forcing() const noexcept { return forcing_; }
  const CellGeometry& geometry() const noexcept { return geom_; }
  int block_count() const noexcept { return block_count_; }
  double initial_power() const noexcept { return initial_power_; }

 private:
  struct Key {
    std::array<std::uint64_t, ParameterVector::kSize> bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  static Key key_of(const ParameterVector& theta) noexcept;

  ForcingMatrix forcing_;
  CellGeometry geom_;
  SimulationPlan plan_;
  int block_count_;
  double initial_power_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Key, std::shared_ptr<const Series>, KeyHash> cache_;
  mutable std::atomic<std::size_t> simulations_{0};
};

}  // namespace thermocal
