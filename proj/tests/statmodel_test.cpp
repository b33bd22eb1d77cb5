#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "test_support.hpp"
#include "thermocal/error.hpp"
#include "thermocal/random.hpp"
#include "thermocal/statmodel.hpp"
#include "thermocal/synthetic.hpp"

using namespace thermocal;

namespace {

const ParameterVector kNominal{{0.175, 10.0, 5.0}};
constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<ForwardModel> fixture_model() {
  return std::make_shared<ForwardModel>(testkit::fixture_forcing(), CellGeometry{}, 30);
}

}  // namespace

TEST(SumSquares, Examples) {
  const Series y{3.0, -1.0, 7.5};
  EXPECT_EQ(sum_squares(y, y), 0.0);
  const Series z30(30, 1.0), y30(30, 0.0);
  EXPECT_DOUBLE_EQ(sum_squares(z30, y30), 30.0);
  EXPECT_DOUBLE_EQ(sum_squares(Series{170, 180}, Series{172, 177}), 13.0);
  EXPECT_THROW(sum_squares(Series{1, 2}, Series{1}), DomainError);
}

TEST(LogLikelihood, Examples) {
  const Series y(30, 150.0);
  EXPECT_NEAR(log_likelihood(y, y, 1.0), -15.0 * std::log(2.0 * std::numbers::pi), 1e-12);
  const double l2 = 2.5;
  const double t = 30.0;
  EXPECT_NEAR(log_likelihood_from_ss(2.0 * l2 * t, 30, l2),
              -(t / 2.0) * std::log(2.0 * std::numbers::pi * l2) - t, 1e-12);
  EXPECT_NEAR(log_likelihood(y, y, 1.0) - log_likelihood(y, y, 2.0), 15.0 * std::log(2.0), 1e-12);
  EXPECT_THROW(log_likelihood(y, y, 0.0), DomainError);
  EXPECT_THROW(log_likelihood(y, y, -1.0), DomainError);
}

TEST(LogLikelihood, PermutingResidualsLeavesValueUnchanged) {
  Rng rng(4);
  Series z(30), y(30, 0.0);
  for (auto& v : z) v = 3.0 * rng.normal();
  const double base = log_likelihood(z, y, 2.0);
  Series p = z;
  std::reverse(p.begin(), p.end());
  std::rotate(p.begin(), p.begin() + 7, p.end());
  EXPECT_NEAR(log_likelihood(p, y, 2.0), base, 1e-12 * std::abs(base));
}

TEST(LogLikelihood, ProfileMaximizerIsSsOverT) {
  Rng rng(8);
  Series z(30), y(30, 0.0);
  for (auto& v : z) v = 1.7 * rng.normal();
  const double ss = sum_squares(z, y);
  auto neg = [&](double log_l2) { return -log_likelihood(z, y, std::exp(log_l2)); };
  const auto [arg, value] = boost::math::tools::brent_find_minima(neg, -5.0, 5.0, 52);
  (void)value;
  EXPECT_NEAR(std::exp(arg), ss / 30.0, 1e-6 * ss / 30.0);
}

TEST(LogPrior, Examples) {
  const PriorSpec prior;
  EXPECT_EQ(log_prior(ParameterVector{{1.2, 10.0, 5.0}}, 1.0, prior), -kInf);
  EXPECT_NEAR(log_prior(kNominal, 1.0, prior), -std::log(1e4), 1e-12);
  EXPECT_NEAR(log_prior(kNominal, 1.0, prior) - log_prior(kNominal, 7.0, prior), std::log(7.0), 1e-12);
  EXPECT_EQ(log_prior(kNominal, 0.0, prior), -kInf);
  EXPECT_EQ(log_prior(kNominal, -1.0, prior), -kInf);
  PriorSpec narrow;
  narrow.upper = {0.5, 20.0, 10.0};
  EXPECT_NEAR(log_prior(kNominal, 1.0, narrow), -std::log(0.5 * 20.0 * 10.0), 1e-12);
}

TEST(PriorSpec, ContainsMidpointAndValidate) {
  const PriorSpec prior;
  EXPECT_TRUE(prior.contains(prior.midpoint()));
  EXPECT_EQ(prior.midpoint(), (ParameterVector{{0.5, 50.0, 50.0}}));
  EXPECT_TRUE(prior.contains(ParameterVector{{0.0, 100.0, 0.0}}));
  PriorSpec bad;
  bad.lower[1] = 100.0;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_NO_THROW(prior.validate());
}

TEST(MeasurementSeries, Validate) {
  MeasurementSeries ok{{1.0, 2.0}, {0.0, 1.0}};
  EXPECT_NO_THROW(ok.validate());
  EXPECT_THROW((MeasurementSeries{{}, {}}).validate(), DataError);
  EXPECT_THROW((MeasurementSeries{{1.0, std::nan("")}, {0.0, 1.0}}).validate(), DataError);
  EXPECT_THROW((MeasurementSeries{{1.0, 2.0}, {0.0}}).validate(), DataError);
}

TEST(Posterior, OutOfSupportShortCircuitsTheSimulator) {
  auto model = fixture_model();
  const SyntheticData data = generate_synthetic(SyntheticDataSpec{}, *model);
  const PosteriorModel post(data.measurements, model);
  const std::size_t before = model->simulation_count();
  const Evaluation e = post.evaluate(ParameterVector{{1.5, 10.0, 5.0}}, 2.0);
  EXPECT_EQ(e.log_post, -kInf);
  EXPECT_EQ(e.prediction, nullptr);
  EXPECT_EQ(model->simulation_count(), before);
  EXPECT_EQ(log_posterior_unnormalized(ParameterVector{{0.2, -3.0, 5.0}}, 2.0, data.measurements,
                                       testkit::fixture_forcing(), CellGeometry{}, PriorSpec{}),
            -kInf);
  EXPECT_EQ(post.evaluate(kNominal, 0.0).log_post, -kInf);
}

TEST(Posterior, DependsOnThetaOnlyThroughSs) {
  auto model = fixture_model();
  const ParameterVector a{{0.175, 10.0, 5.0}};
  const ParameterVector b{{0.3, 14.0, 4.0}};
  const Series& ya = *model->averaged(a);
  const Series& yb = *model->averaged(b);
  MeasurementSeries z;
  for (std::size_t t = 0; t < ya.size(); ++t) {
    z.z.push_back(0.5 * (ya[t] + yb[t]));
    z.timestamps.push_back(static_cast<double>(t));
  }
  const PosteriorModel post(z, model);
  const Evaluation ea = post.evaluate(a, 3.0);
  const Evaluation eb = post.evaluate(b, 3.0);
  EXPECT_NEAR(ea.ss, eb.ss, 1e-9 * ea.ss);
  EXPECT_NEAR(ea.log_post, eb.log_post, 1e-9 * std::abs(ea.log_post));
}

TEST(Posterior, InflatingSsByTenLambda2CostsFive) {
  auto model = fixture_model();
  const SyntheticDataSpec spec;
  const SyntheticData data = generate_synthetic(spec, *model);
  const PosteriorModel post(data.measurements, model);
  const double l2 = spec.lambda * spec.lambda;
  const Evaluation base = post.evaluate(spec.theta, l2);
  const double target = base.ss + 10.0 * l2;
  // Bisect the theta2 offset whose SS hits the target.
  double lo = 0.0, hi = 20.0;
  auto ss_at = [&](double dt2) {
    ParameterVector th = spec.theta;
    th[1] += dt2;
    return post.evaluate(th, l2).ss;
  };
  ASSERT_GT(ss_at(hi), target);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ss_at(mid) < target ? lo : hi) = mid;
  }
  ParameterVector th = spec.theta;
  th[1] += 0.5 * (lo + hi);
  const Evaluation moved = post.evaluate(th, l2);
  EXPECT_NEAR(moved.ss, target, 1e-6);
  EXPECT_NEAR(base.log_post - moved.log_post, 5.0, 1e-6);
}

TEST(Posterior, FreeFunctionMatchesModel) {
  auto model = fixture_model();
  const SyntheticData data = generate_synthetic(SyntheticDataSpec{}, *model);
  const PosteriorModel post(data.measurements, model);
  const double v = log_posterior_unnormalized(kNominal, 2.0, data.measurements,
                                              testkit::fixture_forcing(), CellGeometry{}, PriorSpec{});
  EXPECT_DOUBLE_EQ(v, post.evaluate(kNominal, 2.0).log_post);
  const double ll = log_likelihood(data.measurements.z, *model->averaged(kNominal), 2.0);
  EXPECT_DOUBLE_EQ(v, ll + log_prior(kNominal, 2.0, PriorSpec{}));
  EXPECT_DOUBLE_EQ(post.rescore(kNominal, post.evaluate(kNominal, 2.0).ss, 2.0), v);
}

TEST(Posterior, FiniteExactlyOnSupport) {
  auto model = fixture_model();
  const SyntheticData data = generate_synthetic(SyntheticDataSpec{}, *model);
  const PosteriorModel post(data.measurements, model);
  for (const ParameterVector th : {ParameterVector{{0.0, 0.0, 0.0}}, ParameterVector{{1.0, 100.0, 100.0}},
                                   ParameterVector{{0.5, 50.0, 0.01}}}) {
    EXPECT_TRUE(std::isfinite(post.evaluate(th, 1.0).log_post));
  }
  EXPECT_FALSE(std::isfinite(post.evaluate(ParameterVector{{-1e-9, 10.0, 5.0}}, 1.0).log_post));
  EXPECT_FALSE(std::isfinite(post.evaluate(ParameterVector{{0.5, 100.0 + 1e-9, 5.0}}, 1.0).log_post));
}

TEST(Posterior, LengthMismatchIsADataError) {
  auto model = fixture_model();
  MeasurementSeries z{Series(29, 150.0), Series(29, 0.0)};
  EXPECT_THROW(PosteriorModel(z, model), DataError);
}

TEST(ForwardModel, MemoizesByExactTheta) {
  auto model = fixture_model();
  const auto a = model->averaged(kNominal);
  const auto b = model->averaged(kNominal);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(model->simulation_count(), 1u);
  ParameterVector nudged = kNominal;
  nudged[0] = std::nextafter(nudged[0], 1.0);
  model->averaged(nudged);
  EXPECT_EQ(model->simulation_count(), 2u);
  ParameterVector neg_zero{{-0.0, 10.0, 5.0}};
  ParameterVector pos_zero{{0.0, 10.0, 5.0}};
  model->averaged(pos_zero);
  model->averaged(neg_zero);
  EXPECT_EQ(model->simulation_count(), 3u);
  EXPECT_EQ(model->cache_size(), 3u);
}

TEST(ForwardModel, CapacityBoundsTheCache) {
  ForwardModel uncached(testkit::fixture_forcing(), CellGeometry{}, 30, 0.0, 0);
  uncached.averaged(kNominal);
  uncached.averaged(kNominal);
  EXPECT_EQ(uncached.simulation_count(), 2u);
  EXPECT_EQ(uncached.cache_size(), 0u);
}

TEST(ForwardModel, ConcurrentEvaluationsAgree) {
  auto model = fixture_model();
  std::vector<std::shared_ptr<const Series>> out(8);
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < out.size(); ++k) {
      pool.emplace_back([&, k] { out[k] = model->averaged(ParameterVector{{0.2, 12.0, 6.0}}); });
    }
  }
  for (const auto& p : out) EXPECT_EQ(*p, *out[0]);
}

TEST(ForwardModel, AveragedMatchesSimulateThenAverage) {
  auto model = fixture_model();
  const Series expected =
      block_average(simulate(kNominal, 0.0, testkit::fixture_forcing(), CellGeometry{}).powers, 30);
  EXPECT_EQ(*model->averaged(kNominal), expected);
  EXPECT_THROW(ForwardModel(testkit::fixture_forcing(), CellGeometry{}, 0), DomainError);
}
