#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>

#include "thermocal/forward_model.hpp"
#include "thermocal/thermal_cell.hpp"

namespace thermocal {

struct MeasurementSeries {
  Series z;           // W
  Series timestamps;  // s, aligned with the averaged prediction grid

  std::size_t size() const noexcept { return z.size(); }
  void validate() const;
};

// Independent uniform priors on theta; Jeffreys 1/lambda2 on the noise variance.
struct PriorSpec {
  std::array<double, ParameterVector::kSize> lower{0.0, 0.0, 0.0};
  std::array<double, ParameterVector::kSize> upper{1.0, 100.0, 100.0};

  bool contains(const ParameterVector& theta) const noexcept;
  ParameterVector midpoint() const noexcept;
  double width(std::size_t i) const noexcept { return upper[i] - lower[i]; }
  void validate() const;
};

double sum_squares(std::span<const double> z, std::span<const double> y);

double log_likelihood(std::span<const double> z, std::span<const double> y, double lambda2);

// Gaussian log-likelihood expressed through SS and the number of observations.
double log_likelihood_from_ss(double ss, std::size_t n, double lambda2);

// -inf outside the box, otherwise -log(lambda2) - sum_i log(width_i).
double log_prior(const ParameterVector& theta, double lambda2, const PriorSpec& prior);

struct Evaluation {
  double log_post = 0.0;
  double ss = 0.0;
  std::shared_ptr<const Series> prediction;  // null when out of support
};

// Unnormalized log-posterior over (theta, lambda2) as consumed by the sampler.
class LogTarget {
 public:
  virtual ~LogTarget() = default;

  virtual Evaluation evaluate(const ParameterVector& theta, double lambda2) const = 0;

  // Log-posterior at a new lambda2 for a theta whose SS is already known.
  virtual double rescore(const ParameterVector& theta, double ss, double lambda2) const = 0;

  virtual std::size_t observation_count() const = 0;

  virtual const PriorSpec& prior() const = 0;
};

class PosteriorModel final : public LogTarget {
 public:
  PosteriorModel(MeasurementSeries measurements, std::shared_ptr<const ForwardModel> model,
                 PriorSpec prior = {});

  Evaluation evaluate(const ParameterVector& theta, double lambda2) const override;
  double rescore(const ParameterVector& theta, double ss, double lambda2) const override;
  std::size_t observation_count() const override { return measurements_.size(); }
  const PriorSpec& prior() const override { return prior_; }

  const MeasurementSeries& measurements() const noexcept { return measurements_; }
  const ForwardModel& forward_model() const noexcept { return *model_; }

 private:
  MeasurementSeries measurements_;
  std::shared_ptr<const ForwardModel> model_;
  PriorSpec prior_;
};

// Stateless convenience form: simulate, average, score. Short-circuits to
// -inf without simulating when theta is outside the prior box.
double log_posterior_unnormalized(const ParameterVector& theta, double lambda2,
                                  const MeasurementSeries& z, const ForcingMatrix& forcing,
                                  const CellGeometry& geom, const PriorSpec& prior,
                                  double initial_power = 0.0);

}  // namespace thermocal
