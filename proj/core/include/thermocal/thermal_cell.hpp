#pragma once

// One-node RC surrogate of a test cell held at a heating setpoint.
//
// The wall node T_w obeys
//   C_w dT_w/dt = H_ext(wind) (t_ext - T_w) + H_wa(theta3) (t_set - T_w) + a_w Q_solar
// with H_ext = wall_conductance + wind_film_slope * wind,
//      H_wa  = theta3 * wall_air_conductance_base,
//      Q_solar = window_area * window_solar_factor
//                * (i_beam + i_diff + theta1 * ground_view_factor * i_ghi).
// The air node is held at t_set, so the heating power is the algebraic balance
//   P = H_wa (t_set - T_w) + (H_vent + theta2 H_tb) (t_set - t_ext) - (1 - a_w) Q_solar
// clamped at zero (no cooling).

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace thermocal {

using Series = std::vector<double>;

struct ParameterVector {
  static constexpr std::size_t kSize = 3;

  std::array<double, kSize> values{};

  double albedo() const noexcept { return values[0]; }
  double bridge_factor() const noexcept { return values[1]; }
  double convective_factor() const noexcept { return values[2]; }

  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

inline constexpr std::array<std::string_view, ParameterVector::kSize> kParameterNames{
    "theta1", "theta2", "theta3"};

// Default physical support: albedo in [0,1], the two multipliers in [0,100].
bool in_support(const ParameterVector& theta) noexcept;

struct CellGeometry {
  double wall_area = 9.0;                     // m^2
  double window_area = 1.5;                   // m^2
  double wall_conductance = 8.0;              // W/K, wall to outside (still air)
  double wall_air_conductance_base = 1.6;     // W/K per unit theta3
  double bridge_conductance_base = 0.3;       // W/K per unit theta2
  double ventilation_conductance = 4.0;       // W/K
  double wall_capacitance = 4.0e5;            // J/K
  double window_solar_factor = 0.15;
  double ground_view_factor = 0.5;
  double wind_film_slope = 1.0;               // W/(K m/s)
  double wall_solar_fraction = 0.3;           // a_w

  // Throws DomainError naming the first invalid field.
  void validate() const;
};

struct ForcingRecord {
  double timestamp = 0.0;  // s since sequence start
  double t_ext = 0.0;      // degC
  double i_beam = 0.0;     // W/m^2 on the window plane
  double i_diff = 0.0;     // W/m^2 on the window plane
  double i_ghi = 0.0;      // W/m^2 global horizontal
  double wind = 0.0;       // m/s
  double t_set = 20.0;     // degC
};

struct ForcingMatrix {
  std::vector<ForcingRecord> records;
  double dt = 300.0;  // s

  std::size_t size() const noexcept { return records.size(); }

  // Non-empty, dt > 0, strictly increasing timestamps spaced by dt.
  void validate() const;
};

struct PredictionSeries {
  Series powers;
  double initial_power = 0.0;
};

struct StepResult {
  double wall_temperature;
  double power;
};

StepResult step(double wall_temperature, const ForcingRecord& record, const ParameterVector& theta,
                const CellGeometry& geom, double dt);

// Solar gain through the window for the given record.
double solar_gain(const ForcingRecord& record, const ParameterVector& theta,
                  const CellGeometry& geom) noexcept;

// Air-node heating demand for a given wall temperature, before clamping.
double air_balance(double wall_temperature, const ForcingRecord& record,
                   const ParameterVector& theta, const CellGeometry& geom) noexcept;

// Fixed point of the wall ODE under constant forcing.
double steady_wall_temperature(const ForcingRecord& record, const ParameterVector& theta,
                               const CellGeometry& geom);

// Wall temperature consistent with an observed initial power. Falls back to
// the steady-state wall temperature when y0 <= 0 or theta3 == 0.
double initial_wall_temperature(double y0, const ForcingRecord& record,
                                const ParameterVector& theta, const CellGeometry& geom);

PredictionSeries simulate(const ParameterVector& theta, double y0, const ForcingMatrix& forcing,
                          const CellGeometry& geom);

// Forcing-dependent terms precomputed once, so repeated simulations over the
// same forcing skip the per-step wind-film exponential. Produces the same
// bits as `simulate`.
class SimulationPlan {
 public:
  SimulationPlan(const ForcingMatrix& forcing, const CellGeometry& geom);

  PredictionSeries run(const ParameterVector& theta, double y0) const;

  struct Terms {
    double t_ext;
    double t_set;
    double h_ext;
    double ext_decay;      // exp(-h_ext dt / C)
    double solar_direct;   // window gain from beam + diffuse
    double solar_ground;   // window gain per unit albedo
  };

 private:
  double dt_;
  CellGeometry geom_;
  std::vector<Terms> terms_;
};

// Contiguous near-equal blocks; the first n % block_count blocks hold one
// extra sample.
Series block_average(std::span<const double> series, int block_count);

// Sizes of the blocks used by block_average.
std::vector<std::size_t> block_sizes(std::size_t n, int block_count);

}  // namespace thermocal
