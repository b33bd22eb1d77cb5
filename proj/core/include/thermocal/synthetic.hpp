#pragma once

#include <cstdint>
#include <vector>

#include "thermocal/forward_model.hpp"
#include "thermocal/statmodel.hpp"

namespace thermocal {

struct SyntheticDataSpec {
  ParameterVector theta{{0.175, 10.0, 5.0}};
  double lambda = 1.5;         // noise s.d., W
  std::vector<double> bias{};  // empty: none; one value: constant; T values: per step
  std::uint64_t seed = 7;

  void validate(const PriorSpec& prior, std::size_t block_count) const;
};

struct SyntheticData {
  MeasurementSeries measurements;
  Series truth;  // noiseless, unbiased averaged prediction at theta
  SyntheticDataSpec spec;
};

// z = block_average(simulate(theta)) + b + N(0, lambda^2) i.i.d.
SyntheticData generate_synthetic(const SyntheticDataSpec& spec, const ForwardModel& model,
                                 const PriorSpec& prior = {});

// Timestamps of the averaged grid: mean timestamp of each block.
Series block_timestamps(const ForcingMatrix& forcing, int block_count);

// Deterministic synthetic weather for `days` days at step `dt`: daily
// sinusoidal outside temperature with a cold spell, clear/overcast solar
// days, gusty wind, constant 20 degC setpoint.
ForcingMatrix make_fixture_forcing(int days = 7, double dt = 300.0, std::uint64_t seed = 2015);

}  // namespace thermocal
