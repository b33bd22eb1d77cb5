#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "thermocal/statmodel.hpp"
#include "thermocal/thermal_cell.hpp"

namespace thermocal {

// Any map from parameters to an output time series.
using ResponseFn = std::function<Series(const ParameterVector&)>;

struct OATSpec {
  ParameterVector nominal{{0.175, 10.0, 5.0}};
  double fraction = 0.05;
  double threshold = 0.0;
};

struct HybridIndex {
  double mean = 0.0;
  double sd = 0.0;
  double hybrid = 0.0;
};

struct SensitivityIndices {
  std::array<Series, ParameterVector::kSize> oat;
  std::array<HybridIndex, ParameterVector::kSize> hybrid;
};

// Perturbation step for component i: fraction * |nominal_i|, or fraction *
// prior width when the nominal value is zero.
double oat_step(std::size_t i, const OATSpec& spec, const PriorSpec& prior);

// Central difference (Y(theta* + h e_i) - Y(theta* - h e_i)) / 2h per time step.
Series oat_index(std::size_t i, const OATSpec& spec, const ResponseFn& response,
                 const PriorSpec& prior = {});

// Time mean, time s.d. (denominator T) and sqrt(mean^2 + sd^2).
HybridIndex hybrid_index(std::span<const double> s);

SensitivityIndices oat_analysis(const OATSpec& spec, const ResponseFn& response,
                                const PriorSpec& prior = {});

// Indices with hybrid >= threshold, ordered by descending value then index.
std::vector<std::size_t> screen(std::span<const double> hybrid, double threshold);

struct SobolEstimate {
  double index = 0.0;
  bool negative = false;  // Monte-Carlo noise pushed the estimate below 0
};

// Pick-freeze first-order index of component i for the scalar QoI
// mean(response(theta)), inputs uniform on the prior box.
SobolEstimate sobol_first_order(std::size_t i, const PriorSpec& prior, std::size_t n_mc,
                                const ResponseFn& response, std::uint64_t seed,
                                unsigned threads = 1);

// Per-time-step variant; costs n_mc * 2 evaluations like the scalar one but
// returns one index per output time step.
std::vector<double> sobol_first_order_series(std::size_t i, const PriorSpec& prior,
                                             std::size_t n_mc, const ResponseFn& response,
                                             std::uint64_t seed, unsigned threads = 1);

// Covariance-ratio pick-freeze estimate from paired outputs.
double pick_freeze_ratio(std::span<const double> ya, std::span<const double> yc);

}  // namespace thermocal
