#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace thermocal {

struct UtilitySpec {
  double m = 1.0;  // marginal price
  double c = 0.01;  // defection rate per W over-paid

  void validate() const;
};

struct PointEstimate {
  double value = 0.0;
  double se = 0.0;
};

struct CurvePoint {
  double d = 0.0;
  double expected_utility = 0.0;
  double se = 0.0;
};

struct SearchConfig {
  int grid_points = 201;
  double tolerance = 0.01;  // W
  double margin_sd = 2.0;
};

struct DecisionResult {
  double d_hat = 0.0;
  double utility_at_d_hat = 0.0;
  std::vector<CurvePoint> curve;
  std::vector<std::string> warning_flags;
};

// m d when p_bar > d, m d / (c (d - p_bar) + 1) otherwise.
double utility(double d, double p_bar, const UtilitySpec& spec);

double defection_probability(double d, double p_bar, double c);

PointEstimate expected_utility(double d, std::span<const double> draws, const UtilitySpec& spec);

// Grid over [min - 2 sd, max + 2 sd] followed by golden-section refinement
// around the best grid point. The search runs on the unit-price curve, so m
// only scales the reported utilities.
DecisionResult optimize_fee(std::span<const double> draws, const UtilitySpec& spec,
                            const SearchConfig& search = {});

}  // namespace thermocal
