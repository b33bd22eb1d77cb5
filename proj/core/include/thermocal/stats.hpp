#pragma once

#include <functional>
#include <span>
#include <vector>

namespace thermocal::stats {

double mean(std::span<const double> x);

// Standard deviation with denominator n (population form).
double stddev_population(std::span<const double> x);

// Standard deviation with denominator n - 1.
double stddev_sample(std::span<const double> x);

// Type-7 quantile: linear interpolation between order statistics,
// h = (n - 1) p. `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

// Sorts a copy, then evaluates each probability.
std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs);

// Effective sample size via Geyer's initial positive sequence truncation of
// the empirical autocorrelations. Returns n for a zero-variance series.
double effective_sample_size(std::span<const double> x);

// One-sample Kolmogorov-Smirnov distance between the empirical CDF of x
// and a continuous reference CDF.
double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf);

}  // namespace thermocal::stats
