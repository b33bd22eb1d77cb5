#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "thermocal/forward_model.hpp"
#include "thermocal/mcmc.hpp"
#include "thermocal/statmodel.hpp"

namespace thermocal {

inline constexpr std::size_t kMinDrawsForPValue = 100;

struct PosteriorSample {
  std::vector<Draw> draws;
  // Optional cached averaged predictions aligned with draws (entries may be null).
  std::vector<std::shared_ptr<const Series>> predictions;

  static PosteriorSample from_chain(const Chain& chain);
  std::size_t size() const noexcept { return draws.size(); }
};

struct PredictionEnsemble {
  std::vector<std::shared_ptr<const Series>> trajectories;  // averaged, length T each
  Series mean_trajectory;
  Series qoi;  // period-mean power per draw
};

struct PValueEstimate {
  double p = 0.0;
  double se = 0.0;
};

struct ReplicatePoint {
  double realized = 0.0;    // X^2(Z, theta_m, lambda2_m)
  double predictive = 0.0;  // X^2(Z_rep_m, theta_m, lambda2_m)
};

struct ReplicateEstimate {
  PValueEstimate estimate;
  std::vector<ReplicatePoint> points;
};

struct ValidationReport {
  PValueEstimate expectation;
  PValueEstimate replicate;
  std::vector<double> qoi_probs;
  std::vector<double> qoi_quantiles;
  double alpha = 0.05;
  bool reject_h0 = false;
};

// Reuses sample.predictions and the model cache before simulating. A
// simulation failure is rethrown as NumericalError naming the draw.
PredictionEnsemble propagate(const PosteriorSample& sample, const ForwardModel& model,
                             unsigned threads = 1);

double chi2_discrepancy(std::span<const double> z, std::span<const double> y, double lambda2);

// P[chi2_dof > x] via the regularized upper incomplete gamma function.
double chi2_upper_tail(double x, double dof);

double conditional_pvalue(const MeasurementSeries& z, const ParameterVector& theta, double lambda2,
                          const ForwardModel& model);

// Mean of conditional p-values over the sample; se = sd / sqrt(M).
PValueEstimate p_b_expectation(const MeasurementSeries& z, const PosteriorSample& sample,
                               const ForwardModel& model, unsigned threads = 1);

// Fraction of draws whose replicated discrepancy exceeds the realized one.
// Each draw m uses the RNG substream (seed, m).
ReplicateEstimate p_b_replicate(const MeasurementSeries& z, const PosteriorSample& sample,
                                const ForwardModel& model, std::uint64_t seed,
                                unsigned threads = 1);

std::vector<double> qoi_quantiles(const PredictionEnsemble& ensemble, std::span<const double> probs);

// Rejects H0 when p_B (expectation estimator) <= alpha.
ValidationReport validate(const MeasurementSeries& z, const PosteriorSample& sample,
                          const ForwardModel& model, std::span<const double> probs, double alpha,
                          std::uint64_t seed, unsigned threads = 1,
                          PredictionEnsemble* ensemble_out = nullptr,
                          std::vector<ReplicatePoint>* scatter_out = nullptr);

}  // namespace thermocal
