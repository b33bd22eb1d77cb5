#include "thermocal/statmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "thermocal/error.hpp"

namespace thermocal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void MeasurementSeries::validate() const {
  if (z.empty()) throw DataError("measurement series is empty");
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (!std::isfinite(z[t])) throw DataError("non-finite measurement at index " + std::to_string(t));
  }
  if (!timestamps.empty() && timestamps.size() != z.size()) {
    throw DataError("measurement timestamps and values differ in length");
  }
}

bool PriorSpec::contains(const ParameterVector& theta) const noexcept {
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    if (!(theta[i] >= lower[i] && theta[i] <= upper[i])) return false;
  }
  return true;
}

ParameterVector PriorSpec::midpoint() const noexcept {
  ParameterVector mid;
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) mid[i] = 0.5 * (lower[i] + upper[i]);
  return mid;
}

void PriorSpec::validate() const {
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw DomainError("prior bounds for theta" + std::to_string(i + 1) +
                        " must satisfy lower < upper");
    }
  }
}

double sum_squares(std::span<const double> z, std::span<const double> y) {
  if (z.size() != y.size()) {
    throw DomainError("sum_squares: length mismatch (" + std::to_string(z.size()) + " vs " +
                      std::to_string(y.size()) + ")");
  }
  double ss = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    const double r = z[t] - y[t];
    ss += r * r;
  }
  return ss;
}

double log_likelihood_from_ss(double ss, std::size_t n, double lambda2) {
  if (!(lambda2 > 0.0)) throw DomainError("log_likelihood: lambda2 must be positive");
  return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * lambda2) -
         ss / (2.0 * lambda2);
}

double log_likelihood(std::span<const double> z, std::span<const double> y, double lambda2) {
  return log_likelihood_from_ss(sum_squares(z, y), z.size(), lambda2);
}

double log_prior(const ParameterVector& theta, double lambda2, const PriorSpec& prior) {
  if (!prior.contains(theta) || !(lambda2 > 0.0)) return kNegInf;
  double log_volume = 0.0;
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) log_volume += std::log(prior.width(i));
  return -std::log(lambda2) - log_volume;
}

PosteriorModel::PosteriorModel(MeasurementSeries measurements,
                               std::shared_ptr<const ForwardModel> model, PriorSpec prior)
    : measurements_(std::move(measurements)), model_(std::move(model)), prior_(prior) {
  measurements_.validate();
  prior_.validate();
  if (!model_) throw DomainError("PosteriorModel needs a forward model");
  if (static_cast<std::size_t>(model_->block_count()) != measurements_.size()) {
    throw DataError("measurement length " + std::to_string(measurements_.size()) +
                    " does not match the averaging grid of " +
                    std::to_string(model_->block_count()) + " blocks");
  }
}

Evaluation PosteriorModel::evaluate(const ParameterVector& theta, double lambda2) const {
  const double lp = log_prior(theta, lambda2, prior_);
  if (lp == kNegInf) return {kNegInf, 0.0, nullptr};
  auto prediction = model_->averaged(theta);
  const double ss = sum_squares(measurements_.z, *prediction);
  return {log_likelihood_from_ss(ss, measurements_.size(), lambda2) + lp, ss,
          std::move(prediction)};
}

double PosteriorModel::rescore(const ParameterVector& theta, double ss, double lambda2) const {
  const double lp = log_prior(theta, lambda2, prior_);
  if (lp == kNegInf) return kNegInf;
  return log_likelihood_from_ss(ss, measurements_.size(), lambda2) + lp;
}

double log_posterior_unnormalized(const ParameterVector& theta, double lambda2,
                                  const MeasurementSeries& z, const ForcingMatrix& forcing,
                                  const CellGeometry& geom, const PriorSpec& prior,
                                  double initial_power) {
  const double lp = log_prior(theta, lambda2, prior);
  if (lp == kNegInf) return kNegInf;
  const auto y = block_average(simulate(theta, initial_power, forcing, geom).powers,
                               static_cast<int>(z.size()));
  return log_likelihood(z.z, y, lambda2) + lp;
}

}  // namespace thermocal
