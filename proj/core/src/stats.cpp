#include "thermocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thermocal/error.hpp"

namespace thermocal::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty series");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

namespace {

double sum_sq_dev(std::span<const double> x) {
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc;
}

}  // namespace

double stddev_population(std::span<const double> x) {
  return std::sqrt(sum_sq_dev(x) / static_cast<double>(x.size()));
}

double stddev_sample(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("sample standard deviation needs at least 2 values");
  return std::sqrt(sum_sq_dev(x) / static_cast<double>(x.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty series");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(quantile_sorted(sorted, p));
  return out;
}

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return static_cast<double>(n);
  const double mu = mean(x);
  std::vector<double> centered(n);
  std::transform(x.begin(), x.end(), centered.begin(), [mu](double v) { return v - mu; });

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += centered[t] * centered[t + lag];
    return acc / static_cast<double>(n);
  };

  const double gamma0 = autocov(0);
  if (gamma0 <= 0.0) return static_cast<double>(n);

  // tau = -1 + 2 sum_m (rho_{2m} + rho_{2m+1}) over the initial positive run.
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / gamma0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw DomainError("KS distance of an empty sample");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace thermocal::stats
