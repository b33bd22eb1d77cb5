#include "thermocal/validation.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "thermocal/error.hpp"
#include "thermocal/parallel.hpp"
#include "thermocal/random.hpp"
#include "thermocal/stats.hpp"

namespace thermocal {

namespace {

void require_sample_size(const PosteriorSample& sample, const char* what) {
  if (sample.size() < kMinDrawsForPValue) {
    throw DomainError(std::string(what) + ": need at least " + std::to_string(kMinDrawsForPValue) +
                      " posterior draws, got " + std::to_string(sample.size()));
  }
}

std::shared_ptr<const Series> prediction_for(const PosteriorSample& sample, std::size_t m,
                                             const ForwardModel& model) {
  if (m < sample.predictions.size() && sample.predictions[m]) return sample.predictions[m];
  try {
    return model.averaged(sample.draws[m].theta);
  } catch (const Error& e) {
    throw NumericalError("simulation failed for posterior draw " + std::to_string(m) + ": " +
                         e.what());
  }
}

}  // namespace

PosteriorSample PosteriorSample::from_chain(const Chain& chain) {
  return {chain.draws, chain.predictions};
}

PredictionEnsemble propagate(const PosteriorSample& sample, const ForwardModel& model,
                             unsigned threads) {
  if (sample.size() == 0) throw DomainError("propagate: empty posterior sample");
  const std::size_t m_count = sample.size();
  PredictionEnsemble ens;
  ens.trajectories.resize(m_count);
  ens.qoi.resize(m_count);
  parallel_for(m_count, threads, [&](std::size_t m) {
    ens.trajectories[m] = prediction_for(sample, m, model);
    ens.qoi[m] = stats::mean(*ens.trajectories[m]);
  });
  const std::size_t t_count = ens.trajectories.front()->size();
  ens.mean_trajectory.assign(t_count, 0.0);
  for (const auto& traj : ens.trajectories) {
    for (std::size_t t = 0; t < t_count; ++t) ens.mean_trajectory[t] += (*traj)[t];
  }
  for (double& v : ens.mean_trajectory) v /= static_cast<double>(m_count);
  return ens;
}

double chi2_discrepancy(std::span<const double> z, std::span<const double> y, double lambda2) {
  if (!(lambda2 > 0.0)) throw DomainError("chi2_discrepancy: lambda2 must be positive");
  return sum_squares(z, y) / lambda2;
}

double chi2_upper_tail(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-square degrees of freedom must be positive");
  if (std::isnan(x)) throw DomainError("chi-square tail of NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double conditional_pvalue(const MeasurementSeries& z, const ParameterVector& theta, double lambda2,
                          const ForwardModel& model) {
  const auto y = model.averaged(theta);
  return chi2_upper_tail(chi2_discrepancy(z.z, *y, lambda2), static_cast<double>(z.size()));
}

PValueEstimate p_b_expectation(const MeasurementSeries& z, const PosteriorSample& sample,
                               const ForwardModel& model, unsigned threads) {
  require_sample_size(sample, "p_b_expectation");
  const double dof = static_cast<double>(z.size());
  std::vector<double> pvals(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t m) {
    const auto y = prediction_for(sample, m, model);
    pvals[m] = chi2_upper_tail(chi2_discrepancy(z.z, *y, sample.draws[m].lambda2), dof);
  });
  const double p = stats::mean(pvals);
  const double se = stats::stddev_sample(pvals) / std::sqrt(static_cast<double>(pvals.size()));
  return {p, se};
}

ReplicateEstimate p_b_replicate(const MeasurementSeries& z, const PosteriorSample& sample,
                                const ForwardModel& model, std::uint64_t seed, unsigned threads) {
  require_sample_size(sample, "p_b_replicate");
  ReplicateEstimate out;
  out.points.resize(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t m) {
    const auto y = prediction_for(sample, m, model);
    const double lambda2 = sample.draws[m].lambda2;
    const double sd = std::sqrt(lambda2);
    Rng rng = Rng::substream(seed, m);
    Series z_rep(y->size());
    for (std::size_t t = 0; t < y->size(); ++t) z_rep[t] = (*y)[t] + sd * rng.normal();
    out.points[m] = {chi2_discrepancy(z.z, *y, lambda2), chi2_discrepancy(z_rep, *y, lambda2)};
  });
  std::size_t above = 0;
  for (const auto& pt : out.points) above += pt.predictive > pt.realized ? 1 : 0;
  const double n = static_cast<double>(sample.size());
  const double p = static_cast<double>(above) / n;
  out.estimate = {p, std::sqrt(p * (1.0 - p) / n)};
  return out;
}

std::vector<double> qoi_quantiles(const PredictionEnsemble& ensemble,
                                  std::span<const double> probs) {
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("QoI quantile probabilities must lie in (0,1)");
  }
  return stats::quantiles(ensemble.qoi, probs);
}

ValidationReport validate(const MeasurementSeries& z, const PosteriorSample& sample,
                          const ForwardModel& model, std::span<const double> probs, double alpha,
                          std::uint64_t seed, unsigned threads, PredictionEnsemble* ensemble_out,
                          std::vector<ReplicatePoint>* scatter_out) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  ValidationReport report;
  PredictionEnsemble ensemble = propagate(sample, model, threads);
  report.expectation = p_b_expectation(z, sample, model, threads);
  ReplicateEstimate rep = p_b_replicate(z, sample, model, seed, threads);
  report.replicate = rep.estimate;
  report.qoi_probs.assign(probs.begin(), probs.end());
  report.qoi_quantiles = qoi_quantiles(ensemble, probs);
  report.alpha = alpha;
  report.reject_h0 = report.expectation.p <= alpha;
  if (ensemble_out) *ensemble_out = std::move(ensemble);
  if (scatter_out) *scatter_out = std::move(rep.points);
  return report;
}

}  // namespace thermocal
