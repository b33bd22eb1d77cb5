#include "thermocal/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "thermocal/error.hpp"
#include "thermocal/stats.hpp"

namespace thermocal {

namespace {

// Utility per unit price; the full utility is m times this.
double unit_utility(double d, double p_bar, double c) {
  if (p_bar > d) return d;
  const double denom = c * (d - p_bar) + 1.0;
  if (!(denom > 0.0)) throw DomainError("utility: c (d - p_bar) + 1 must be positive");
  return d / denom;
}

double unit_expected(double d, std::span<const double> draws, double c) {
  double acc = 0.0;
  for (double p : draws) acc += unit_utility(d, p, c);
  return acc / static_cast<double>(draws.size());
}

}  // namespace

void UtilitySpec::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("marginal price m must be positive");
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("defection rate c must be non-negative");
}

double utility(double d, double p_bar, const UtilitySpec& spec) {
  if (!(d > 0.0)) throw DomainError("utility: fee d must be positive");
  if (!(spec.m > 0.0)) throw DomainError("utility: unit price m must be positive");
  if (!(spec.c >= 0.0)) throw DomainError("utility: c must be non-negative");
  return spec.m * unit_utility(d, p_bar, spec.c);
}

double defection_probability(double d, double p_bar, double c) {
  if (d < p_bar) throw DomainError("defection_probability: no over-payment (d < p_bar)");
  if (!(c >= 0.0)) throw DomainError("defection_probability: c must be non-negative");
  return 1.0 - 1.0 / (c * (d - p_bar) + 1.0);
}

PointEstimate expected_utility(double d, std::span<const double> draws, const UtilitySpec& spec) {
  if (draws.empty()) throw DomainError("expected_utility: no draws");
  if (!(d > 0.0)) throw DomainError("expected_utility: fee d must be positive");
  std::vector<double> u(draws.size());
  std::transform(draws.begin(), draws.end(), u.begin(),
                 [&](double p) { return utility(d, p, spec); });
  const double mu = stats::mean(u);
  const double se = u.size() > 1 ? stats::stddev_sample(u) / std::sqrt(static_cast<double>(u.size()))
                                  : 0.0;
  return {mu, se};
}

DecisionResult optimize_fee(std::span<const double> draws, const UtilitySpec& spec,
                            const SearchConfig& search) {
  spec.validate();
  if (draws.size() < 100) throw DomainError("optimize_fee needs at least 100 QoI draws");
  if (search.grid_points < 3) throw DomainError("optimize_fee needs at least 3 grid points");
  if (!(search.tolerance > 0.0)) throw DomainError("optimize_fee tolerance must be positive");

  const auto [lo_it, hi_it] = std::minmax_element(draws.begin(), draws.end());
  const double sd = stats::stddev_sample(draws);
  // Fees are positive; keep the grid strictly above zero.
  const double lo = std::max(*lo_it - search.margin_sd * sd, 1e-9);
  const double hi = std::max(*hi_it + search.margin_sd * sd, lo + search.tolerance);
  const int n = search.grid_points;
  const double step = (hi - lo) / (n - 1);

  DecisionResult result;
  result.curve.reserve(static_cast<std::size_t>(n));
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double d = k == n - 1 ? hi : lo + step * k;
    const double value = unit_expected(d, draws, spec.c);
    if (value > best_value) {  // strict: ties keep the smaller d
      best_value = value;
      best = k;
    }
    const PointEstimate e = expected_utility(d, draws, spec);
    result.curve.push_back({d, e.value, e.se});
  }

  // Golden-section refinement on the bracket around the best grid point.
  double a = result.curve[static_cast<std::size_t>(std::max(best - 1, 0))].d;
  double b = result.curve[static_cast<std::size_t>(std::min(best + 1, n - 1))].d;
  const double inv_phi = 1.0 / std::numbers::phi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = unit_expected(x1, draws, spec.c);
  double f2 = unit_expected(x2, draws, spec.c);
  while (b - a > search.tolerance) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = unit_expected(x1, draws, spec.c);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = unit_expected(x2, draws, spec.c);
    }
  }
  // Candidates: the refined interior point and the bracket ends (covers
  // monotone curves whose maximum sits on the grid boundary).
  double d_hat = result.curve[static_cast<std::size_t>(best)].d;
  double u_hat = best_value;
  for (double cand : {a, 0.5 * (a + b), b}) {
    const double v = unit_expected(cand, draws, spec.c);
    if (v > u_hat || (v == u_hat && cand < d_hat)) {
      u_hat = v;
      d_hat = cand;
    }
  }
  result.d_hat = d_hat;
  result.utility_at_d_hat = spec.m * u_hat;
  if (best == n - 1) result.warning_flags.emplace_back("unbounded_direction");
  if (best == 0) result.warning_flags.emplace_back("lower_boundary");
  return result;
}

}  // namespace thermocal
