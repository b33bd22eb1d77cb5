#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thermocal/decision.hpp"
#include "thermocal/error.hpp"
#include "thermocal/random.hpp"
#include "thermocal/stats.hpp"

using namespace thermocal;

namespace {

std::vector<double> concentrated_draws(std::uint64_t seed, std::size_t n = 5000, double mu = 174.0,
                                       double sd = 2.0) {
  Rng rng(seed);
  std::vector<double> d(n);
  for (auto& v : d) v = mu + sd * rng.normal();
  return d;
}

double brute_utility(double d, const std::vector<double>& draws, double c) {
  double acc = 0.0;
  for (double p : draws) acc += p > d ? d : d / (c * (d - p) + 1.0);
  return acc / static_cast<double>(draws.size());
}

// Dense-grid argmax over the optimizer's own search interval.
double brute_force_argmax(const std::vector<double>& draws, double c, std::size_t points) {
  const auto [lo_it, hi_it] = std::minmax_element(draws.begin(), draws.end());
  const double sd = stats::stddev_sample(draws);
  const double lo = *lo_it - 2.0 * sd;
  const double hi = *hi_it + 2.0 * sd;
  double best_d = lo;
  double best = -1.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double d = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    const double u = brute_utility(d, draws, c);
    if (u > best) {
      best = u;
      best_d = d;
    }
  }
  return best_d;
}

}  // namespace

TEST(Utility, Branches) {
  const UtilitySpec spec{2.0, 0.05};
  EXPECT_DOUBLE_EQ(utility(170.0, 175.0, spec), 340.0);
  EXPECT_DOUBLE_EQ(utility(175.0, 175.0, spec), 350.0);
  EXPECT_DOUBLE_EQ(utility(180.0, 175.0, spec), 360.0 / (0.05 * 5.0 + 1.0));
  EXPECT_DOUBLE_EQ(utility(190.0, 150.0, UtilitySpec{1.0, 0.0}), 190.0);
  EXPECT_THROW(utility(0.0, 1.0, spec), DomainError);
  EXPECT_THROW(utility(10.0, 1.0, UtilitySpec{1.0, -0.5}), DomainError);
  EXPECT_THROW(utility(10.0, 1.0, UtilitySpec{0.0, 0.5}), DomainError);
}

TEST(Utility, ContinuousAtTheKink) {
  const UtilitySpec spec{1.3, 0.2};
  const double p = 172.0;
  const double at = utility(p, p, spec);
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    EXPECT_NEAR(utility(p - eps, p, spec), at, 2.0 * spec.m * eps + 1e-9);
    EXPECT_NEAR(utility(p + eps, p, spec), at, 2.0 * spec.m * p * spec.c * eps + 1e-9);
  }
}

TEST(DefectionProbability, Examples) {
  EXPECT_EQ(defection_probability(170.0, 170.0, 0.2), 0.0);
  EXPECT_EQ(defection_probability(190.0, 170.0, 0.0), 0.0);
  EXPECT_NEAR(defection_probability(180.0, 170.0, 0.01), 1.0 - 1.0 / 1.1, 1e-15);
  EXPECT_NEAR(defection_probability(170.5, 170.0, 1e-4), 0.5e-4, 1e-8);
  EXPECT_THROW(defection_probability(160.0, 170.0, 0.01), DomainError);
  EXPECT_THROW(defection_probability(180.0, 170.0, -0.01), DomainError);
}

TEST(ExpectedUtility, Examples) {
  const UtilitySpec spec{1.5, 0.1};
  const std::vector<double> same(200, 175.0);
  const PointEstimate below = expected_utility(170.0, same, spec);
  EXPECT_DOUBLE_EQ(below.value, 1.5 * 170.0);
  EXPECT_EQ(below.se, 0.0);
  const auto draws = concentrated_draws(3, 300);
  for (double d : {150.0, 174.0, 190.0}) {
    EXPECT_DOUBLE_EQ(expected_utility(d, draws, UtilitySpec{1.5, 0.0}).value, 1.5 * d);
  }
  const std::vector<double> two{170.0, 180.0};
  const double d = 175.0;
  EXPECT_NEAR(expected_utility(d, two, spec).value,
              (1.5 * d / 2.0) * (1.0 + 1.0 / (0.1 * (d - 170.0) + 1.0)), 1e-12);
  EXPECT_THROW(expected_utility(-1.0, two, spec), DomainError);
}

TEST(OptimizeFee, ZeroDefectionRateRunsToTheUpperEndpoint) {
  const auto draws = concentrated_draws(4, 500);
  const DecisionResult r = optimize_fee(draws, UtilitySpec{1.0, 0.0});
  EXPECT_DOUBLE_EQ(r.d_hat, r.curve.back().d);
  ASSERT_EQ(r.warning_flags.size(), 1u);
  EXPECT_EQ(r.warning_flags[0], "unbounded_direction");
  const std::vector<double> flat(150, 170.0);
  const DecisionResult f = optimize_fee(flat, UtilitySpec{1.0, 0.0});
  EXPECT_EQ(f.warning_flags, std::vector<std::string>{"unbounded_direction"});
  EXPECT_DOUBLE_EQ(f.d_hat, f.curve.back().d);
}

TEST(OptimizeFee, GridShapeAndCurve) {
  const auto draws = concentrated_draws(5, 1000);
  const DecisionResult r = optimize_fee(draws, UtilitySpec{1.0, 0.01});
  ASSERT_EQ(r.curve.size(), 201u);
  const auto [lo, hi] = std::minmax_element(draws.begin(), draws.end());
  const double sd = stats::stddev_sample(draws);
  EXPECT_NEAR(r.curve.front().d, *lo - 2.0 * sd, 1e-9);
  EXPECT_NEAR(r.curve.back().d, *hi + 2.0 * sd, 1e-9);
  for (const auto& pt : r.curve) EXPECT_LE(pt.expected_utility, r.utility_at_d_hat + 1e-9);
  EXPECT_TRUE(r.warning_flags.empty());
  EXPECT_NEAR(r.utility_at_d_hat, expected_utility(r.d_hat, draws, UtilitySpec{1.0, 0.01}).value, 1e-9);
}

TEST(OptimizeFee, MatchesDenseBruteForce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto draws = concentrated_draws(seed, 2000);
    for (double c : {0.001, 0.01, 0.05, 0.2}) {
      const DecisionResult r = optimize_fee(draws, UtilitySpec{1.0, c});
      EXPECT_NEAR(r.d_hat, brute_force_argmax(draws, c, 100000), 0.05) << "seed " << seed << " c " << c;
    }
  }
}

TEST(OptimizeFee, PriceScalingLeavesTheArgmaxUnchanged) {
  const auto draws = concentrated_draws(6, 1500);
  for (double c : {0.01, 0.2}) {
    const DecisionResult base = optimize_fee(draws, UtilitySpec{1.0, c});
    for (double k : {0.1, 10.0, 1234.5}) {
      const DecisionResult scaled = optimize_fee(draws, UtilitySpec{k, c});
      EXPECT_EQ(scaled.d_hat, base.d_hat);
      EXPECT_NEAR(scaled.utility_at_d_hat, k * base.utility_at_d_hat, 1e-12 * k * base.utility_at_d_hat);
    }
  }
}

TEST(OptimizeFee, HigherDefectionRateLowersFeeAndUtility) {
  const auto draws = concentrated_draws(7, 3000);
  const DecisionResult low = optimize_fee(draws, UtilitySpec{1.0, 0.01});
  const DecisionResult high = optimize_fee(draws, UtilitySpec{1.0, 0.20});
  EXPECT_GT(low.d_hat, high.d_hat);
  double last_d = std::numeric_limits<double>::infinity();
  double last_u = std::numeric_limits<double>::infinity();
  for (double c : {0.001, 0.01, 0.05, 0.1, 0.2}) {
    const DecisionResult r = optimize_fee(draws, UtilitySpec{1.0, c});
    EXPECT_LE(r.d_hat, last_d) << c;
    EXPECT_LE(r.utility_at_d_hat, last_u) << c;
    last_d = r.d_hat;
    last_u = r.utility_at_d_hat;
  }
}

TEST(OptimizeFee, RejectsBadInputs) {
  const auto draws = concentrated_draws(8, 99);
  EXPECT_THROW(optimize_fee(draws, UtilitySpec{}), DomainError);
  const auto enough = concentrated_draws(8, 100);
  SearchConfig cfg;
  cfg.grid_points = 2;
  EXPECT_THROW(optimize_fee(enough, UtilitySpec{}, cfg), DomainError);
  cfg = {};
  cfg.tolerance = 0.0;
  EXPECT_THROW(optimize_fee(enough, UtilitySpec{}, cfg), DomainError);
}
