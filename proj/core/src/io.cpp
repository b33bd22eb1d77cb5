#include "thermocal/io.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "thermocal/error.hpp"

namespace thermocal::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

double parse_number(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw DataError(where(path, line_no) + ": malformed number '" + std::string(field) + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path, std::string_view expected_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  CsvTable table;
  const auto header_fields = split(expected_header, ',');
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    auto fields = split(t, ',');
    if (!header_seen) {
      if (fields != header_fields) {
        throw DataError(where(path, line_no) + ": expected header '" +
                        std::string(expected_header) + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != header_fields.size()) {
      throw DataError(where(path, line_no) + ": expected " + std::to_string(header_fields.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!header_seen) throw DataError(path.string() + ": empty file");
  if (table.rows.empty()) throw DataError(path.string() + ": no data rows");
  return table;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

double parse_timestamp(const std::string& field, const std::filesystem::path& path,
                       std::size_t line_no) {
  if (field.find('-') != std::string::npos && field.find('T') != std::string::npos) {
    try {
      return parse_iso8601(field);
    } catch (const DataError& e) {
      throw DataError(where(path, line_no) + ": " + e.what());
    }
  }
  return parse_number(field, path, line_no);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_iso8601(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double s = 0.0;
  char tail = '\0';
  const int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%lf%c", &y, &mo, &d, &h, &mi, &s, &tail);
  if (n < 6 || (n == 7 && tail != 'Z')) throw DataError("malformed ISO-8601 timestamp '" + text + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0.0 || s >= 61.0) {
    throw DataError("invalid ISO-8601 timestamp '" + text + "'");
  }
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days_since_epoch) * 86400.0 + h * 3600.0 + mi * 60.0 + s;
}

ForcingMatrix load_forcing(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "timestamp,t_ext,i_beam,i_diff,i_ghi,wind,t_set");
  ForcingMatrix forcing;
  forcing.records.reserve(table.rows.size());
  double origin = 0.0;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const std::size_t ln = table.line_numbers[k];
    ForcingRecord r;
    const double stamp = parse_timestamp(row[0], path, ln);
    if (k == 0) origin = stamp;
    r.timestamp = stamp - origin;
    r.t_ext = parse_number(row[1], path, ln);
    r.i_beam = parse_number(row[2], path, ln);
    r.i_diff = parse_number(row[3], path, ln);
    r.i_ghi = parse_number(row[4], path, ln);
    r.wind = parse_number(row[5], path, ln);
    r.t_set = parse_number(row[6], path, ln);
    if (r.i_beam < 0.0 || r.i_diff < 0.0 || r.i_ghi < 0.0) {
      throw DataError(where(path, ln) + ": negative irradiance");
    }
    if (k > 0) {
      const double gap = r.timestamp - forcing.records.back().timestamp;
      if (!(gap > 0.0)) throw DataError(where(path, ln) + ": timestamp not strictly increasing");
      if (k == 1) {
        forcing.dt = gap;
      } else if (std::abs(gap - forcing.dt) > 1e-6 * forcing.dt) {
        throw DataError(where(path, ln) + ": non-uniform spacing, interval of " + format_double(gap) +
                        " s after " + format_double(forcing.dt) + " s steps");
      }
    }
    forcing.records.push_back(r);
  }
  forcing.validate();
  return forcing;
}

void write_forcing(const std::filesystem::path& path, const ForcingMatrix& forcing) {
  auto out = open_out(path);
  out << "timestamp,t_ext,i_beam,i_diff,i_ghi,wind,t_set\n";
  for (const auto& r : forcing.records) {
    out << format_double(r.timestamp) << ',' << format_double(r.t_ext) << ','
        << format_double(r.i_beam) << ',' << format_double(r.i_diff) << ','
        << format_double(r.i_ghi) << ',' << format_double(r.wind) << ',' << format_double(r.t_set)
        << '\n';
  }
}

namespace {

using GeometryField = double CellGeometry::*;

const std::map<std::string, GeometryField, std::less<>>& geometry_fields() {
  static const std::map<std::string, GeometryField, std::less<>> fields{
      {"wall_area", &CellGeometry::wall_area},
      {"window_area", &CellGeometry::window_area},
      {"wall_conductance", &CellGeometry::wall_conductance},
      {"wall_air_conductance_base", &CellGeometry::wall_air_conductance_base},
      {"bridge_conductance_base", &CellGeometry::bridge_conductance_base},
      {"ventilation_conductance", &CellGeometry::ventilation_conductance},
      {"wall_capacitance", &CellGeometry::wall_capacitance},
      {"window_solar_factor", &CellGeometry::window_solar_factor},
      {"ground_view_factor", &CellGeometry::ground_view_factor},
      {"wind_film_slope", &CellGeometry::wind_film_slope},
      {"wall_solar_fraction", &CellGeometry::wall_solar_fraction},
  };
  return fields;
}

}  // namespace

CellGeometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CellGeometry geom;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = trim(line);
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw DataError(where(path, line_no) + ": expected key = value");
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key == "version") {
      if (parse_number(value, path, line_no) != 1.0) {
        throw DataError(where(path, line_no) + ": unsupported geometry file version");
      }
      continue;
    }
    const auto& fields = geometry_fields();
    const auto it = fields.find(key);
    if (it == fields.end()) throw DataError(where(path, line_no) + ": unknown key '" + std::string(key) + "'");
    geom.*(it->second) = parse_number(value, path, line_no);
  }
  try {
    geom.validate();
  } catch (const DomainError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return geom;
}

void write_geometry(const std::filesystem::path& path, const CellGeometry& geom) {
  auto out = open_out(path);
  out << "version = 1\n";
  for (const auto& [key, field] : geometry_fields()) {
    out << key << " = " << format_double(geom.*field) << '\n';
  }
}

MeasurementSeries load_measurements(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "timestamp,power_w");
  MeasurementSeries z;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    z.timestamps.push_back(parse_number(table.rows[k][0], path, table.line_numbers[k]));
    z.z.push_back(parse_number(table.rows[k][1], path, table.line_numbers[k]));
  }
  z.validate();
  return z;
}

void write_measurements(const std::filesystem::path& path, const MeasurementSeries& z) {
  auto out = open_out(path);
  out << "timestamp,power_w\n";
  for (std::size_t t = 0; t < z.size(); ++t) {
    const double stamp = t < z.timestamps.size() ? z.timestamps[t] : static_cast<double>(t);
    out << format_double(stamp) << ',' << format_double(z.z[t]) << '\n';
  }
}

void write_chain(const std::filesystem::path& path, const std::vector<Draw>& draws) {
  auto out = open_out(path);
  out << "iter,theta1,theta2,theta3,lambda2\n";
  for (const auto& d : draws) {
    out << d.iter << ',' << format_double(d.theta[0]) << ',' << format_double(d.theta[1]) << ','
        << format_double(d.theta[2]) << ',' << format_double(d.lambda2) << '\n';
  }
}

std::vector<Draw> load_chain(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "iter,theta1,theta2,theta3,lambda2");
  std::vector<Draw> draws;
  draws.reserve(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const std::size_t ln = table.line_numbers[k];
    Draw d;
    d.iter = static_cast<int>(parse_number(row[0], path, ln));
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i) d.theta[i] = parse_number(row[i + 1], path, ln);
    d.lambda2 = parse_number(row[4], path, ln);
    draws.push_back(d);
  }
  return draws;
}

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<std::shared_ptr<const Series>>& trajectories) {
  auto out = open_out(path);
  out << "draw,t,power_w\n";
  for (std::size_t m = 0; m < trajectories.size(); ++m) {
    if (!trajectories[m]) continue;
    const Series& s = *trajectories[m];
    for (std::size_t t = 0; t < s.size(); ++t) out << m << ',' << t << ',' << format_double(s[t]) << '\n';
  }
}

std::vector<std::shared_ptr<const Series>> load_trajectories(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "draw,t,power_w");
  std::vector<Series> series;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const std::size_t ln = table.line_numbers[k];
    const auto m = static_cast<std::size_t>(parse_number(table.rows[k][0], path, ln));
    const auto t = static_cast<std::size_t>(parse_number(table.rows[k][1], path, ln));
    if (m >= series.size()) series.resize(m + 1);
    if (t != series[m].size()) throw DataError(where(path, ln) + ": trajectory rows out of order");
    series[m].push_back(parse_number(table.rows[k][2], path, ln));
  }
  std::vector<std::shared_ptr<const Series>> out;
  out.reserve(series.size());
  for (auto& s : series) out.push_back(s.empty() ? nullptr : std::make_shared<const Series>(std::move(s)));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace thermocal::io
