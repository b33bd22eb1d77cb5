#pragma once

// File formats: forcing and measurement CSVs, the flat key/value geometry
// file, and chain / prediction CSVs. Doubles are written in shortest
// round-trip form so reloading reproduces values bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include "thermocal/mcmc.hpp"
#include "thermocal/statmodel.hpp"
#include "thermocal/thermal_cell.hpp"

namespace thermocal::io {

std::string format_double(double v);

// Header `timestamp,t_ext,i_beam,i_diff,i_ghi,wind,t_set`. Timestamps are
// integer seconds or ISO-8601 (YYYY-MM-DDTHH:MM:SS[Z]); they are rebased to
// seconds since the first row and dt is taken from the first interval.
ForcingMatrix load_forcing(const std::filesystem::path& path);
void write_forcing(const std::filesystem::path& path, const ForcingMatrix& forcing);

// Parses an ISO-8601 date-time into seconds since the Unix epoch.
double parse_iso8601(const std::string& text);

// `key = value` lines, `#` comments. Unknown keys are rejected.
CellGeometry load_geometry(const std::filesystem::path& path);
void write_geometry(const std::filesystem::path& path, const CellGeometry& geom);

// Header `timestamp,power_w`.
MeasurementSeries load_measurements(const std::filesystem::path& path);
void write_measurements(const std::filesystem::path& path, const MeasurementSeries& z);

// Header `iter,theta1,theta2,theta3,lambda2`.
void write_chain(const std::filesystem::path& path, const std::vector<Draw>& draws);
std::vector<Draw> load_chain(const std::filesystem::path& path);

// Long format `draw,t,power_w`.
void write_trajectories(const std::filesystem::path& path,
                        const std::vector<std::shared_ptr<const Series>>& trajectories);
std::vector<std::shared_ptr<const Series>> load_trajectories(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace thermocal::io
