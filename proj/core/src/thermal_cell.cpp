#include "thermocal/thermal_cell.hpp"

#include <cmath>
#include <string>

#include "thermocal/error.hpp"

namespace thermocal {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string("non-finite ") + field);
  }
}

void check_record(const ForcingRecord& r) {
  require_finite(r.t_ext, "t_ext");
  require_finite(r.i_beam, "i_beam");
  require_finite(r.i_diff, "i_diff");
  require_finite(r.i_ghi, "i_ghi");
  require_finite(r.wind, "wind");
  require_finite(r.t_set, "t_set");
}

double exterior_conductance(const ForcingRecord& r, const CellGeometry& g) noexcept {
  return g.wall_conductance + g.wind_film_slope * r.wind;
}

double wall_air_conductance(const ParameterVector& theta, const CellGeometry& g) noexcept {
  return theta.convective_factor() * g.wall_air_conductance_base;
}

double direct_loss_conductance(const ParameterVector& theta, const CellGeometry& g) noexcept {
  return g.ventilation_conductance + theta.bridge_factor() * g.bridge_conductance_base;
}

}  // namespace

bool in_support(const ParameterVector& theta) noexcept {
  return theta[0] >= 0.0 && theta[0] <= 1.0 && theta[1] >= 0.0 && theta[1] <= 100.0 &&
         theta[2] >= 0.0 && theta[2] <= 100.0;
}

void CellGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("geometry field ") + name + " must be strictly positive");
    }
  };
  auto fraction = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError(std::string("geometry field ") + name + " must lie in [0,1]");
    }
  };
  positive(wall_area, "wall_area");
  positive(window_area, "window_area");
  positive(wall_conductance, "wall_conductance");
  positive(wall_air_conductance_base, "wall_air_conductance_base");
  positive(bridge_conductance_base, "bridge_conductance_base");
  positive(ventilation_conductance, "ventilation_conductance");
  positive(wall_capacitance, "wall_capacitance");
  fraction(window_solar_factor, "window_solar_factor");
  fraction(ground_view_factor, "ground_view_factor");
  fraction(wall_solar_fraction, "wall_solar_fraction");
  if (!(wind_film_slope >= 0.0) || !std::isfinite(wind_film_slope)) {
    throw DomainError("geometry field wind_film_slope must be non-negative");
  }
}

void ForcingMatrix::validate() const {
  if (records.empty()) throw DataError("forcing matrix is empty");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DataError("forcing dt must be positive");
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (r.i_beam < 0.0 || r.i_diff < 0.0 || r.i_ghi < 0.0) {
      throw DataError("negative irradiance at record " + std::to_string(k));
    }
    if (k == 0) continue;
    const double gap = r.timestamp - records[k - 1].timestamp;
    if (!(gap > 0.0)) {
      throw DataError("timestamps not strictly increasing at record " + std::to_string(k));
    }
    if (std::abs(gap - dt) > 1e-6 * dt) {
      throw DataError("non-uniform spacing between records " + std::to_string(k - 1) + " and " +
                      std::to_string(k) + ": " + std::to_string(gap) + " s instead of " +
                      std::to_string(dt) + " s");
    }
  }
}

namespace {

using Terms = SimulationPlan::Terms;

Terms make_terms(const ForcingRecord& r, const CellGeometry& g, double dt) {
  const double h_ext = exterior_conductance(r, g);
  const double window = g.window_area * g.window_solar_factor;
  return {r.t_ext,
          r.t_set,
          h_ext,
          std::exp(-h_ext * dt / g.wall_capacitance),
          window * (r.i_beam + r.i_diff),
          window * g.ground_view_factor * r.i_ghi};
}

// theta-dependent constants shared by every step of a run.
struct ThetaTerms {
  double albedo;
  double h_wa;
  double h_direct;
  double wa_decay;  // exp(-h_wa dt / C)
};

ThetaTerms make_theta_terms(const ParameterVector& theta, const CellGeometry& g, double dt) {
  const double h_wa = wall_air_conductance(theta, g);
  return {theta.albedo(), h_wa, direct_loss_conductance(theta, g),
          std::exp(-h_wa * dt / g.wall_capacitance)};
}

inline double gain(const Terms& k, const ThetaTerms& th) noexcept {
  return k.solar_direct + th.albedo * k.solar_ground;
}

inline double steady(const Terms& k, const ThetaTerms& th, double a_w) noexcept {
  return (k.h_ext * k.t_ext + th.h_wa * k.t_set + a_w * gain(k, th)) / (k.h_ext + th.h_wa);
}

inline double demand(double wall, const Terms& k, const ThetaTerms& th, double a_w) noexcept {
  return th.h_wa * (k.t_set - wall) + th.h_direct * (k.t_set - k.t_ext) - (1.0 - a_w) * gain(k, th);
}

inline StepResult advance(double wall, const Terms& k, const ThetaTerms& th, double a_w) noexcept {
  const double t_inf = steady(k, th, a_w);
  const double t_new = t_inf + (wall - t_inf) * (k.ext_decay * th.wa_decay);
  const double p = demand(t_new, k, th, a_w);
  return {t_new, p > 0.0 ? p : 0.0};
}

double initial_wall(double y0, const Terms& k, const ThetaTerms& th, double a_w) {
  if (!(y0 > 0.0) || !(th.h_wa > 0.0)) return steady(k, th, a_w);
  // y0 = H_wa (t_set - T_w) + rest  =>  T_w = t_set - (y0 - rest) / H_wa
  const double rest = demand(k.t_set, k, th, a_w);
  return k.t_set - (y0 - rest) / th.h_wa;
}

}  // namespace

double solar_gain(const ForcingRecord& r, const ParameterVector& theta,
                  const CellGeometry& g) noexcept {
  return gain(make_terms(r, g, 1.0), make_theta_terms(theta, g, 1.0));
}

double air_balance(double wall_temperature, const ForcingRecord& r, const ParameterVector& theta,
                   const CellGeometry& g) noexcept {
  return demand(wall_temperature, make_terms(r, g, 1.0), make_theta_terms(theta, g, 1.0),
                g.wall_solar_fraction);
}

double steady_wall_temperature(const ForcingRecord& r, const ParameterVector& theta,
                               const CellGeometry& g) {
  return steady(make_terms(r, g, 1.0), make_theta_terms(theta, g, 1.0), g.wall_solar_fraction);
}

double initial_wall_temperature(double y0, const ForcingRecord& r, const ParameterVector& theta,
                                const CellGeometry& g) {
  return initial_wall(y0, make_terms(r, g, 1.0), make_theta_terms(theta, g, 1.0),
                      g.wall_solar_fraction);
}

StepResult step(double wall_temperature, const ForcingRecord& r, const ParameterVector& theta,
                const CellGeometry& g, double dt) {
  require_finite(wall_temperature, "wall temperature state");
  check_record(r);
  if (!(dt > 0.0)) throw DomainError("step length dt must be positive");
  return advance(wall_temperature, make_terms(r, g, dt), make_theta_terms(theta, g, dt),
                 g.wall_solar_fraction);
}

SimulationPlan::SimulationPlan(const ForcingMatrix& forcing, const CellGeometry& geom)
    : dt_(forcing.dt), geom_(geom) {
  if (!(forcing.dt > 0.0)) throw DomainError("step length dt must be positive");
  terms_.reserve(forcing.size());
  for (std::size_t k = 0; k < forcing.size(); ++k) {
    try {
      check_record(forcing.records[k]);
    } catch (const DomainError& e) {
      throw DomainError("simulate: time index " + std::to_string(k) + ": " + e.what());
    }
    terms_.push_back(make_terms(forcing.records[k], geom_, forcing.dt));
  }
}

PredictionSeries SimulationPlan::run(const ParameterVector& theta, double y0) const {
  if (terms_.empty()) throw DomainError("simulate: forcing is empty");
  if (!(y0 >= 0.0)) throw DomainError("simulate: initial power must be non-negative");
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    if (!std::isfinite(theta[i])) {
      throw DomainError("simulate: non-finite theta" + std::to_string(i + 1));
    }
  }
  const ThetaTerms th = make_theta_terms(theta, geom_, dt_);
  const double a_w = geom_.wall_solar_fraction;
  PredictionSeries out;
  out.initial_power = y0;
  out.powers.resize(terms_.size());
  double wall = initial_wall(y0, terms_.front(), th, a_w);
  if (!std::isfinite(wall)) throw DomainError("simulate: time index 0: non-finite wall temperature state");
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const StepResult r = advance(wall, terms_[k], th, a_w);
    wall = r.wall_temperature;
    out.powers[k] = r.power;
  }
  if (!std::isfinite(wall)) throw DomainError("simulate: non-finite wall temperature state");
  return out;
}

PredictionSeries simulate(const ParameterVector& theta, double y0, const ForcingMatrix& forcing,
                          const CellGeometry& geom) {
  return SimulationPlan(forcing, geom).run(theta, y0);
}

std::vector<std::size_t> block_sizes(std::size_t n, int block_count) {
  if (block_count <= 0 || static_cast<std::size_t>(block_count) > n) {
    throw DomainError("block_count must lie in [1, " + std::to_string(n) + "], got " +
                      std::to_string(block_count));
  }
  const std::size_t b = static_cast<std::size_t>(block_count);
  const std::size_t base = n / b;
  const std::size_t extra = n % b;
  std::vector<std::size_t> sizes(b, base);
  for (std::size_t k = 0; k < extra; ++k) ++sizes[k];
  return sizes;
}

Series block_average(std::span<const double> series, int block_count) {
  const auto sizes = block_sizes(series.size(), block_count);
  Series out;
  out.reserve(sizes.size());
  std::size_t pos = 0;
  for (std::size_t len : sizes) {
    double acc = 0.0;
    for (std::size_t k = pos; k < pos + len; ++k) acc += series[k];
    out.push_back(acc / static_cast<double>(len));
    pos += len;
  }
  return out;
}

}  // namespace thermocal
