#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "thermocal/error.hpp"
#include "thermocal/random.hpp"
#include "thermocal/sensitivity.hpp"

using namespace thermocal;

namespace {

PriorSpec unit_box() {
  PriorSpec p;
  p.lower = {0.0, 0.0, 0.0};
  p.upper = {1.0, 1.0, 1.0};
  return p;
}

// Y_t = c_t + sum_i a_i(t) theta_i
ResponseFn affine(std::array<double, 3> slope, std::size_t len = 24) {
  return [slope, len](const ParameterVector& th) {
    Series y(len);
    for (std::size_t t = 0; t < len; ++t) {
      const double w = 1.0 + 0.125 * static_cast<double>(t);
      y[t] = 3.0 + w * (slope[0] * th[0] + slope[1] * th[1] + slope[2] * th[2]);
    }
    return y;
  };
}

ResponseFn scalar(std::function<double(const ParameterVector&)> f) {
  return [f](const ParameterVector& th) { return Series{f(th), f(th)}; };
}

}  // namespace

TEST(OatIndex, ExactOnAffineDoubles) {
  // Dyadic nominal, steps and slopes keep every operation exact, so any error
  // would come from the difference formula itself.
  const std::array<double, 3> slope{-2.5, 0.75, 13.0};
  OATSpec spec;
  spec.nominal = ParameterVector{{0.25, 8.0, 4.0}};
  for (double fraction : {0.0078125, 0.03125, 0.125, 0.25}) {
    spec.fraction = fraction;
    for (std::size_t i = 0; i < 3; ++i) {
      const Series s = oat_index(i, spec, affine(slope));
      for (std::size_t t = 0; t < s.size(); ++t) {
        const double expected = (1.0 + 0.125 * static_cast<double>(t)) * slope[i];
        ASSERT_NEAR(s[t], expected, 1e-12 * std::max(1.0, std::abs(expected))) << i << " " << t;
      }
    }
  }
}

TEST(OatIndex, GenericAffineWithinRoundingFloor) {
  const std::array<double, 3> slope{-2.5, 0.75, 13.0};
  OATSpec spec;
  for (double fraction : {0.01, 0.05, 0.2, 0.45}) {
    spec.fraction = fraction;
    for (std::size_t i = 0; i < 3; ++i) {
      const Series y = affine(slope)(spec.nominal);
      const double y_max = std::abs(*std::max_element(y.begin(), y.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
      const double floor = 8.0 * std::numeric_limits<double>::epsilon() * y_max / oat_step(i, spec, {});
      const Series s = oat_index(i, spec, affine(slope));
      for (std::size_t t = 0; t < s.size(); ++t) {
        ASSERT_NEAR(s[t], (1.0 + 0.125 * static_cast<double>(t)) * slope[i], floor) << i << " " << t;
      }
    }
  }
}

TEST(OatIndex, IndependentParameterGivesZero) {
  const Series s = oat_index(1, OATSpec{}, affine({1.0, 0.0, 2.0}));
  for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(OatIndex, StepRuleAndZeroNominalFallback) {
  OATSpec spec;
  const PriorSpec prior;
  EXPECT_DOUBLE_EQ(oat_step(1, spec, prior), 0.5);
  spec.nominal[0] = 0.0;
  EXPECT_DOUBLE_EQ(oat_step(0, spec, prior), 0.05);
  // theta1 = 0 with a step of 0.05 pushes below the box.
  EXPECT_THROW(oat_index(0, spec, affine({1, 1, 1}), prior), DomainError);
  PriorSpec wide = prior;
  wide.lower[0] = -1.0;
  const Series s = oat_index(0, spec, affine({4.0, 1.0, 1.0}), wide);
  EXPECT_NEAR(s[0], 4.0, 1e-12);
  spec.fraction = 0.5;
  EXPECT_THROW(oat_step(0, spec, prior), DomainError);
  spec.fraction = 0.0;
  EXPECT_THROW(oat_step(0, spec, prior), DomainError);
}

TEST(OatIndex, OutOfSupportSuggestsSmallerFraction) {
  OATSpec spec;
  spec.nominal = ParameterVector{{0.98, 10.0, 5.0}};
  try {
    oat_index(0, spec, affine({1, 1, 1}));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("smaller fraction"), std::string::npos);
  }
}

TEST(OatIndex, AgreesWithFinerStepOnRcModel) {
  auto model = std::make_shared<ForwardModel>(testkit::fixture_forcing(), CellGeometry{}, 30);
  const ResponseFn response = [model](const ParameterVector& th) { return *model->averaged(th); };
  OATSpec spec;
  OATSpec fine = spec;
  fine.fraction = spec.fraction / 10.0;
  int checked = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Series s = oat_index(i, spec, response);
    const Series s_fine = oat_index(i, fine, response);
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (std::abs(s_fine[t]) <= 0.1) continue;
      ++checked;
      EXPECT_NEAR(s[t], s_fine[t], 0.01 * std::abs(s_fine[t])) << "theta" << i + 1 << " t=" << t;
    }
  }
  EXPECT_GT(checked, 30);
}

TEST(HybridIndex, Examples) {
  const HybridIndex c = hybrid_index(Series{-4.0, -4.0, -4.0});
  EXPECT_EQ(c.mean, -4.0);
  EXPECT_EQ(c.sd, 0.0);
  EXPECT_EQ(c.hybrid, 4.0);
  const HybridIndex z = hybrid_index(Series{3.0, -3.0});
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.sd, 3.0);
  EXPECT_EQ(z.hybrid, 3.0);
  const HybridIndex zm = hybrid_index(Series{1.0, -2.0, 1.0});
  EXPECT_NEAR(zm.hybrid, zm.sd, 1e-15);
  EXPECT_THROW(hybrid_index(Series{1.0}), DomainError);
}

TEST(HybridIndex, DefinitionHolds) {
  Rng rng(8);
  Series s(30);
  for (auto& v : s) v = 5.0 + 3.0 * rng.normal();
  const HybridIndex h = hybrid_index(s);
  EXPECT_NEAR(h.hybrid, std::sqrt(h.mean * h.mean + h.sd * h.sd), 1e-12 * h.hybrid);
}

TEST(Screen, Examples) {
  const std::vector<double> v{5.0, 1.0, 3.0};
  EXPECT_EQ(screen(v, 0.0), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_TRUE(screen(v, 5.01).empty());
  EXPECT_EQ(screen(v, 2.0), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(screen(std::vector<double>{2.0, 2.0, 1.0}, 0.5), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(screen(v, -1.0), DomainError);
}

TEST(Screen, ZeroThresholdKeepsAllAndRaisingNeverAdds) {
  Rng rng(2);
  std::vector<double> v(12);
  for (auto& x : v) x = 10.0 * rng.uniform();
  EXPECT_EQ(screen(v, 0.0).size(), v.size());
  std::size_t last = v.size();
  for (double thr = 0.0; thr <= 11.0; thr += 0.25) {
    const auto kept = screen(v, thr);
    EXPECT_LE(kept.size(), last);
    last = kept.size();
    for (std::size_t k = 1; k < kept.size(); ++k) EXPECT_GE(v[kept[k - 1]], v[kept[k]]);
  }
}

TEST(OatAnalysis, FillsEveryComponent) {
  const SensitivityIndices idx = oat_analysis(OATSpec{}, affine({1.0, -2.0, 0.0}));
  EXPECT_NEAR(idx.hybrid[1].mean, -2.0 * (1.0 + 0.125 * 11.5), 1e-12);
  EXPECT_EQ(idx.hybrid[2].hybrid, 0.0);
  OATSpec outside;
  outside.nominal[1] = 200.0;
  EXPECT_THROW(oat_analysis(outside, affine({1, 1, 1})), DomainError);
}

TEST(Sobol, AdditiveDoubleSplitsVariance) {
  const PriorSpec box = unit_box();
  const ResponseFn y = scalar([](const ParameterVector& th) { return th[0] + th[1]; });
  const SobolEstimate s1 = sobol_first_order(0, box, 10000, y, 11);
  const SobolEstimate s2 = sobol_first_order(1, box, 10000, y, 12);
  const SobolEstimate s3 = sobol_first_order(2, box, 10000, y, 13);
  EXPECT_NEAR(s1.index, 0.5, 0.05);
  EXPECT_NEAR(s2.index, 0.5, 0.05);
  EXPECT_NEAR(s3.index, 0.0, 0.05);
  EXPECT_EQ(s3.negative, s3.index < 0.0);
  const double sum = s1.index + s2.index + s3.index;
  EXPECT_GE(sum, 0.9);
  EXPECT_LE(sum, 1.1);
}

TEST(Sobol, SingleInputExplainsEverything) {
  const ResponseFn y = scalar([](const ParameterVector& th) { return std::exp(th[2]); });
  EXPECT_NEAR(sobol_first_order(2, unit_box(), 10000, y, 3).index, 1.0, 0.05);
  EXPECT_NEAR(sobol_first_order(0, unit_box(), 10000, y, 4).index, 0.0, 0.05);
}

TEST(Sobol, UnequalWeightsOnThePriorBox) {
  // Y = theta1 + theta2 / 100 on the default box: equal variance shares.
  const ResponseFn y = scalar([](const ParameterVector& th) { return th[0] + 0.01 * th[1] + 0.0 * th[2]; });
  const PriorSpec prior;
  EXPECT_NEAR(sobol_first_order(0, prior, 10000, y, 5).index, 0.5, 0.05);
  EXPECT_NEAR(sobol_first_order(1, prior, 10000, y, 6).index, 0.5, 0.05);
}

TEST(Sobol, ThreadCountDoesNotChangeTheEstimate) {
  const ResponseFn y = scalar([](const ParameterVector& th) { return th[0] * th[1] + th[2]; });
  const double a = sobol_first_order(1, unit_box(), 2000, y, 9, 1).index;
  const double b = sobol_first_order(1, unit_box(), 2000, y, 9, 4).index;
  EXPECT_EQ(a, b);
  EXPECT_THROW(sobol_first_order(1, unit_box(), 999, y, 9), DomainError);
}

TEST(Sobol, TimeResolvedSeries) {
  // Early steps depend on theta1 only, late steps on theta2 only.
  const ResponseFn y = [](const ParameterVector& th) { return Series{th[0], th[0], th[1]}; };
  const auto s0 = sobol_first_order_series(0, unit_box(), 5000, y, 21);
  ASSERT_EQ(s0.size(), 3u);
  EXPECT_NEAR(s0[0], 1.0, 0.05);
  EXPECT_NEAR(s0[2], 0.0, 0.05);
}

TEST(PickFreeze, RatioOnKnownPairs) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_NEAR(pick_freeze_ratio(a, a), 1.0, 1e-15);
  const std::vector<double> flat{2, 2, 2, 2};
  EXPECT_EQ(pick_freeze_ratio(flat, flat), 0.0);
  EXPECT_THROW(pick_freeze_ratio(a, std::vector<double>{1, 2}), DomainError);
}
