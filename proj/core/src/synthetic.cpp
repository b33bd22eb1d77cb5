#include "thermocal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thermocal/error.hpp"
#include "thermocal/random.hpp"

namespace thermocal {

void SyntheticDataSpec::validate(const PriorSpec& prior, std::size_t block_count) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("synthetic lambda must be positive");
  if (!prior.contains(theta)) throw DomainError("synthetic theta outside the prior support");
  if (bias.size() > 1 && bias.size() != block_count) {
    throw DomainError("synthetic bias must be a constant or have one value per averaged step");
  }
}

Series block_timestamps(const ForcingMatrix& forcing, int block_count) {
  Series stamps(forcing.size());
  std::transform(forcing.records.begin(), forcing.records.end(), stamps.begin(),
                 [](const ForcingRecord& r) { return r.timestamp; });
  return block_average(stamps, block_count);
}

SyntheticData generate_synthetic(const SyntheticDataSpec& spec, const ForwardModel& model,
                                 const PriorSpec& prior) {
  const auto t_count = static_cast<std::size_t>(model.block_count());
  spec.validate(prior, t_count);
  SyntheticData out;
  out.spec = spec;
  out.truth = *model.averaged(spec.theta);
  out.measurements.timestamps = block_timestamps(model.forcing(), model.block_count());
  out.measurements.z.resize(t_count);
  Rng rng(spec.seed);
  for (std::size_t t = 0; t < t_count; ++t) {
    double b = 0.0;
    if (spec.bias.size() == 1) b = spec.bias.front();
    if (spec.bias.size() == t_count) b = spec.bias[t];
    out.measurements.z[t] = out.truth[t] + b + spec.lambda * rng.normal();
  }
  return out;
}

ForcingMatrix make_fixture_forcing(int days, double dt, std::uint64_t seed) {
  if (days < 1 || !(dt > 0.0)) throw DomainError("fixture forcing needs days >= 1 and dt > 0");
  constexpr double kDay = 86400.0;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Rng rng(seed);

  // Per-day weather: clearness index and wind level.
  std::vector<double> clearness(static_cast<std::size_t>(days));
  std::vector<double> wind_level(static_cast<std::size_t>(days));
  for (int d = 0; d < days; ++d) {
    clearness[static_cast<std::size_t>(d)] = 0.2 + 0.8 * rng.uniform();
    wind_level[static_cast<std::size_t>(d)] = 1.0 + 6.0 * rng.uniform();
  }

  ForcingMatrix f;
  f.dt = dt;
  const auto n = static_cast<std::size_t>(std::llround(days * kDay / dt));
  f.records.reserve(n);
  double gust = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double time = static_cast<double>(k) * dt;
    const auto day = std::min(static_cast<std::size_t>(time / kDay), clearness.size() - 1);
    const double hour = std::fmod(time, kDay) / 3600.0;
    ForcingRecord r;
    r.timestamp = time;
    // Cold spell mid-week on top of a daily cycle peaking mid-afternoon.
    const double spell = -3.0 * std::exp(-std::pow((time / kDay - 3.5) / 1.2, 2));
    r.t_ext = 5.5 + spell + 3.0 * std::sin(kTwoPi * (hour - 9.0) / 24.0) +
              1.0 * std::sin(kTwoPi * time / (2.7 * kDay));
    const double elevation = std::sin(std::numbers::pi * (hour - 8.0) / 9.0);
    if (hour > 8.0 && hour < 17.0 && elevation > 0.0) {
      const double kt = clearness[day];
      r.i_ghi = 450.0 * elevation * (0.25 + 0.75 * kt);
      r.i_beam = 380.0 * elevation * kt * kt;
      r.i_diff = 90.0 * elevation * (1.0 - 0.5 * kt);
    }
    gust = 0.9 * gust + 0.45 * rng.normal();
    r.wind = std::max(0.0, wind_level[day] + 1.5 * std::sin(kTwoPi * (hour - 14.0) / 24.0) + gust);
    r.t_set = 20.0;
    f.records.push_back(r);
  }
  return f;
}

}  // namespace thermocal
