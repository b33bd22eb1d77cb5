#include "thermocal/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "thermocal/error.hpp"
#include "thermocal/parallel.hpp"
#include "thermocal/random.hpp"
#include "thermocal/stats.hpp"

namespace thermocal {

double oat_step(std::size_t i, const OATSpec& spec, const PriorSpec& prior) {
  if (i >= ParameterVector::kSize) throw DomainError("parameter index out of range");
  if (!(spec.fraction > 0.0 && spec.fraction < 0.5)) {
    throw DomainError("OAT perturbation fraction must lie in (0, 0.5)");
  }
  const double nominal = spec.nominal[i];
  return nominal != 0.0 ? spec.fraction * std::abs(nominal) : spec.fraction * prior.width(i);
}

Series oat_index(std::size_t i, const OATSpec& spec, const ResponseFn& response,
                 const PriorSpec& prior) {
  const double h = oat_step(i, spec, prior);
  ParameterVector up = spec.nominal;
  ParameterVector down = spec.nominal;
  up[i] += h;
  down[i] -= h;
  if (!prior.contains(up) || !prior.contains(down)) {
    throw DomainError("OAT perturbation of theta" + std::to_string(i + 1) +
                      " leaves the prior support; use a smaller fraction");
  }
  const Series y_up = response(up);
  const Series y_down = response(down);
  if (y_up.size() != y_down.size()) throw DomainError("response lengths differ");
  // Divide by the step actually taken; nominal +- h is rarely exact in binary.
  const double width = up[i] - down[i];
  Series s(y_up.size());
  for (std::size_t t = 0; t < s.size(); ++t) s[t] = (y_up[t] - y_down[t]) / width;
  return s;
}

HybridIndex hybrid_index(std::span<const double> s) {
  if (s.size() < 2) throw DomainError("hybrid index needs a series of length >= 2");
  HybridIndex h;
  h.mean = stats::mean(s);
  h.sd = stats::stddev_population(s);
  h.hybrid = std::hypot(h.mean, h.sd);
  return h;
}

SensitivityIndices oat_analysis(const OATSpec& spec, const ResponseFn& response,
                                const PriorSpec& prior) {
  if (!prior.contains(spec.nominal)) throw DomainError("OAT nominal point outside the prior box");
  SensitivityIndices out;
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    out.oat[i] = oat_index(i, spec, response, prior);
    out.hybrid[i] = hybrid_index(out.oat[i]);
  }
  return out;
}

std::vector<std::size_t> screen(std::span<const double> hybrid, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("screening threshold must be non-negative");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < hybrid.size(); ++i) {
    if (hybrid[i] >= threshold) kept.push_back(i);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](std::size_t a, std::size_t b) { return hybrid[a] > hybrid[b]; });
  return kept;
}

double pick_freeze_ratio(std::span<const double> ya, std::span<const double> yc) {
  if (ya.size() != yc.size() || ya.empty()) throw DomainError("pick-freeze samples must pair up");
  const double n = static_cast<double>(ya.size());
  double centre = 0.0;
  for (std::size_t k = 0; k < ya.size(); ++k) centre += 0.5 * (ya[k] + yc[k]);
  centre /= n;
  double cross = 0.0;
  double square = 0.0;
  for (std::size_t k = 0; k < ya.size(); ++k) {
    const double a = ya[k] - centre;
    const double c = yc[k] - centre;
    cross += a * c;
    square += 0.5 * (a * a + c * c);
  }
  if (square <= 0.0) return 0.0;
  return cross / square;
}

namespace {

struct PickFreezeDesign {
  std::vector<ParameterVector> a;
  std::vector<ParameterVector> c;
};

PickFreezeDesign make_design(std::size_t i, const PriorSpec& prior, std::size_t n_mc,
                             std::uint64_t seed) {
  if (i >= ParameterVector::kSize) throw DomainError("parameter index out of range");
  if (n_mc < 1000) throw DomainError("Sobol estimation needs n_mc >= 1000");
  PickFreezeDesign d;
  d.a.resize(n_mc);
  d.c.resize(n_mc);
  for (std::size_t k = 0; k < n_mc; ++k) {
    Rng rng = Rng::substream(seed, k);
    for (std::size_t j = 0; j < ParameterVector::kSize; ++j) {
      d.a[k][j] = prior.lower[j] + prior.width(j) * rng.uniform();
    }
    for (std::size_t j = 0; j < ParameterVector::kSize; ++j) {
      d.c[k][j] = prior.lower[j] + prior.width(j) * rng.uniform();
    }
    d.c[k][i] = d.a[k][i];
  }
  return d;
}

}  // namespace

SobolEstimate sobol_first_order(std::size_t i, const PriorSpec& prior, std::size_t n_mc,
                                const ResponseFn& response, std::uint64_t seed,
                                unsigned threads) {
  const PickFreezeDesign d = make_design(i, prior, n_mc, seed);
  std::vector<double> ya(n_mc);
  std::vector<double> yc(n_mc);
  parallel_for(n_mc, threads, [&](std::size_t k) {
    ya[k] = stats::mean(response(d.a[k]));
    yc[k] = stats::mean(response(d.c[k]));
  });
  const double s = pick_freeze_ratio(ya, yc);
  return {s, s < 0.0};
}

std::vector<double> sobol_first_order_series(std::size_t i, const PriorSpec& prior,
                                             std::size_t n_mc, const ResponseFn& response,
                                             std::uint64_t seed, unsigned threads) {
  const PickFreezeDesign d = make_design(i, prior, n_mc, seed);
  std::vector<Series> ya(n_mc);
  std::vector<Series> yc(n_mc);
  parallel_for(n_mc, threads, [&](std::size_t k) {
    ya[k] = response(d.a[k]);
    yc[k] = response(d.c[k]);
  });
  const std::size_t t_count = ya.front().size();
  std::vector<double> out(t_count);
  std::vector<double> col_a(n_mc);
  std::vector<double> col_c(n_mc);
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t k = 0; k < n_mc; ++k) {
      col_a[k] = ya[k][t];
      col_c[k] = yc[k][t];
    }
    out[t] = pick_freeze_ratio(col_a, col_c);
  }
  return out;
}

}  // namespace thermocal
