#pragma once

// CSV / JSON serialization of observable records, trajectories and wave
// samples. Numbers are written with 17 significant digits so every double
// round-trips exactly.

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qho/evolution.hpp"
#include "qho/observables.hpp"
#include "qho/wavefunction.hpp"

namespace qho::io {

inline constexpr std::string_view csv_schema_version = "1";

/// %.17g without locale dependence.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

/// Column names of an ObservableRecord; complex fields split into _re/_im.
inline const std::vector<std::string>& record_fields() {
  static const std::vector<std::string> fields = {
      "time",     "mean_x",    "mean_p",    "mean_x2",     "mean_p2", "n_avg",
      "a_avg_re", "a_avg_im",  "a2_avg_re", "a2_avg_im",   "uncertainty", "energy"};
  return fields;
}

/// Values in record_fields() order.
inline std::vector<double> record_values(const ObservableRecord& r) {
  return {r.time,         r.mean_x,       r.mean_p,        r.mean_x2,       r.mean_p2,       r.n_avg,
          r.a_avg.real(), r.a_avg.imag(), r.a2_avg.real(), r.a2_avg.imag(), r.uncertainty, r.energy};
}

/// Field-wise |lhs - rhs| as a record (time copied from lhs).
inline ObservableRecord absolute_difference(const ObservableRecord& lhs, const ObservableRecord& rhs) {
  ObservableRecord d;
  d.time = lhs.time;
  d.mean_x = std::abs(lhs.mean_x - rhs.mean_x);
  d.mean_p = std::abs(lhs.mean_p - rhs.mean_p);
  d.mean_x2 = std::abs(lhs.mean_x2 - rhs.mean_x2);
  d.mean_p2 = std::abs(lhs.mean_p2 - rhs.mean_p2);
  d.n_avg = std::abs(lhs.n_avg - rhs.n_avg);
  d.a_avg = {std::abs(lhs.a_avg.real() - rhs.a_avg.real()), std::abs(lhs.a_avg.imag() - rhs.a_avg.imag())};
  d.a2_avg = {std::abs(lhs.a2_avg.real() - rhs.a2_avg.real()), std::abs(lhs.a2_avg.imag() - rhs.a2_avg.imag())};
  d.uncertainty = std::abs(lhs.uncertainty - rhs.uncertainty);
  d.energy = std::abs(lhs.energy - rhs.energy);
  return d;
}

/// Largest field of a record produced by absolute_difference (time excluded).
inline double max_field(const ObservableRecord& d) {
  const auto values = record_values(d);
  double m = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) m = std::max(m, values[i]);
  return m;
}

inline void write_csv_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << format_number(values[i]);
  }
  out << "\r\n";
}

inline void write_csv_header(std::ostream& out, std::span<const std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out << ',';
    out << names[i];
  }
  out << "\r\n";
}

inline nlohmann::ordered_json record_to_json(const ObservableRecord& r) {
  nlohmann::ordered_json j;
  const auto& names = record_fields();
  const auto values = record_values(r);
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = values[i];
  return j;
}

inline ObservableRecord record_from_json(const nlohmann::json& j) {
  ObservableRecord r;
  r.time = j.at("time").get<double>();
  r.mean_x = j.at("mean_x").get<double>();
  r.mean_p = j.at("mean_p").get<double>();
  r.mean_x2 = j.at("mean_x2").get<double>();
  r.mean_p2 = j.at("mean_p2").get<double>();
  r.n_avg = j.at("n_avg").get<double>();
  r.a_avg = {j.at("a_avg_re").get<double>(), j.at("a_avg_im").get<double>()};
  r.a2_avg = {j.at("a2_avg_re").get<double>(), j.at("a2_avg_im").get<double>()};
  r.uncertainty = j.at("uncertainty").get<double>();
  r.energy = j.at("energy").get<double>();
  return r;
}

/// Trajectory as CSV: '#' schema line, header row, one record per row.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "# qho trajectory schema=" << csv_schema_version << " dt=" << format_number(traj.dt()) << "\r\n";
  write_csv_header(out, record_fields());
  for (const auto& r : traj.records()) write_csv_row(out, record_values(r));
}

inline const std::vector<std::string>& wave_fields() {
  static const std::vector<std::string> fields = {"x", "re", "im", "abs2"};
  return fields;
}

/// Wave samples as CSV columns x, re, im, abs2.
inline void write_wave_csv(std::ostream& out, std::span<const WaveSample> samples) {
  write_csv_header(out, wave_fields());
  for (const auto& s : samples) {
    const std::array<double, 4> row = {s.x, s.value.real(), s.value.imag(), std::norm(s.value)};
    write_csv_row(out, row);
  }
}

}  // namespace qho::io
