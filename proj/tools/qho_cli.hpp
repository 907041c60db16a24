#pragma once

// Command-line front end: each subcommand builds a numeric table from the
// library and writes it as CSV (with '#' comment header) or JSON.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qho/qho.hpp"
#include "qho_verify/acceptance.hpp"

namespace qho::cli {

using ordered_json = nlohmann::ordered_json;

enum exit_code : int { ok = 0, usage_error = 1, io_error = 2, verify_failed = 3 };

inline constexpr const char* output_dir_env = "QHO_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  double chi_re = 1.0;
  double chi_im = 0.0;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;
  std::string n_max = "auto";
  double t_start = 0.0;
  double t_end = 2.0 * pi;
  double dt = 2.0 * pi / 64.0;
  double grid_halfwidth = default_grid_halfwidth;
  std::size_t grid_points = default_grid_points;
  std::string output_path;
  std::string format = "csv";
  std::uint64_t seed = 20240917;

  CoherentLabel label() const { return CoherentLabel(chi_re, chi_im); }
  OscillatorParams params() const { return {hbar, mass, omega}; }
  bool auto_n_max() const { return n_max == "auto"; }
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::optional<std::size_t> numeric_n_max(const RunConfig& c) {
  if (c.auto_n_max()) return std::nullopt;
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(c.n_max, &pos);
  } catch (const std::exception&) {
    throw config_error("n-max must be a nonnegative integer or \"auto\", got \"" + c.n_max + "\"");
  }
  if (pos != c.n_max.size() || value < 0) {
    throw config_error("n-max must be a nonnegative integer or \"auto\", got \"" + c.n_max + "\"");
  }
  return static_cast<std::size_t>(value);
}

inline void validate(const RunConfig& c) {
  if (!(c.t_end >= c.t_start)) throw config_error("t-end must not precede t-start");
  if (!(c.dt > 0.0)) throw config_error("dt must be positive");
  if (c.grid_points < 3 || c.grid_points % 2 == 0) throw config_error("grid-points must be odd and at least 3");
  if (!(c.grid_halfwidth > 0.0)) throw config_error("grid-halfwidth must be positive");
  if (c.format != "csv" && c.format != "json") throw config_error("format must be csv or json");
  try {
    (void)c.params();
    (void)c.label();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  (void)numeric_n_max(c);
}

/// Tail-rule tolerance used when the wave packet itself (an amplitude) is evaluated: amplitude
/// errors scale with the square root of the tail.
inline constexpr double amplitude_tail_tolerance = 1e-24;

/// Resolve "auto" before any computation. The spectrum uses the plain tail rule, moment-based
/// commands keep two spare levels above it, and the wavefunction applies it at amplitude precision.
inline std::size_t resolve_n_max(const RunConfig& c) {
  if (auto n = numeric_n_max(c)) return *n;
  if (c.command == "spectrum") return qho::auto_n_max(c.label());
  if (c.command == "wavefunction") return qho::auto_n_max(c.label(), amplitude_tail_tolerance);
  return auto_n_max_with_margin(c.label());
}

inline std::vector<double> sample_times(const RunConfig& c) {
  const auto count = static_cast<std::size_t>(std::floor((c.t_end - c.t_start) / c.dt + 1e-9)) + 1;
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = c.t_start + c.dt * static_cast<double>(k);
  return times;
}

/// Numeric table plus structured footer; every command produces one.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  ordered_json footer = ordered_json::object();
  std::vector<std::string> notes;  ///< extra header facts, "key=value"
};

inline ordered_json config_json(const RunConfig& c, std::size_t resolved_n_max) {
  ordered_json j;
  j["command"] = c.command;
  j["chi_re"] = c.chi_re;
  j["chi_im"] = c.chi_im;
  j["hbar"] = c.hbar;
  j["mass"] = c.mass;
  j["omega"] = c.omega;
  j["n_max"] = c.n_max;
  j["resolved_n_max"] = resolved_n_max;
  j["t_start"] = c.t_start;
  j["t_end"] = c.t_end;
  j["dt"] = c.dt;
  j["grid_halfwidth"] = c.grid_halfwidth;
  j["grid_points"] = c.grid_points;
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j;
}

inline std::string scalar_text(const ordered_json& v) {
  if (v.is_number_float()) return io::format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void write_key_values(std::ostream& out, const ordered_json& obj) {
  bool first = true;
  for (const auto& [key, value] : obj.items()) {
    out << (first ? "" : " ") << key << '=' << scalar_text(value);
    first = false;
  }
}

inline void write_csv(std::ostream& out, const RunConfig& c, std::size_t resolved_n_max, const Table& t) {
  out << "# qho-csv schema=" << io::csv_schema_version << " command=" << c.command << "\r\n";
  out << "# config ";
  write_key_values(out, config_json(c, resolved_n_max));
  out << "\r\n";
  for (const auto& note : t.notes) out << "# " << note << "\r\n";
  io::write_csv_header(out, t.columns);
  for (const auto& row : t.rows) io::write_csv_row(out, row);
  // Footer: scalars on one line, each array element on its own line.
  ordered_json scalars = ordered_json::object();
  for (const auto& [key, value] : t.footer.items()) {
    if (!value.is_array()) scalars[key] = value;
  }
  if (!scalars.empty()) {
    out << "# footer ";
    write_key_values(out, scalars);
    out << "\r\n";
  }
  for (const auto& [key, value] : t.footer.items()) {
    if (!value.is_array()) continue;
    for (const auto& element : value) {
      out << "# footer " << key << ' ';
      write_key_values(out, element);
      out << "\r\n";
    }
  }
}

inline void write_json(std::ostream& out, const RunConfig& c, std::size_t resolved_n_max, const Table& t) {
  ordered_json j;
  j["schema"] = std::stoi(std::string(io::csv_schema_version));
  j["config"] = config_json(c, resolved_n_max);
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json r;
    for (std::size_t i = 0; i < t.columns.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["footer"] = t.footer;
  out << j.dump(2) << '\n';
}

inline std::vector<std::string> prefixed(const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& f : io::record_fields()) {
    if (f != "time") out.push_back(prefix + f);
  }
  return out;
}

inline void append_fields(std::vector<double>& row, const ObservableRecord& r) {
  const auto values = io::record_values(r);
  row.insert(row.end(), values.begin() + 1, values.end());
}

/// Brute-force and closed-form averages per sample time, with field-wise absolute differences.
inline Table trajectory_table(const RunConfig& c, std::size_t n_max) {
  const auto params = c.params();
  const auto label = c.label();
  const StateVector initial = coherent_coefficients(label, n_max);
  const auto margin = support_margin(initial);

  Table t;
  t.columns = {"time"};
  for (const auto& names : {prefixed(""), prefixed("closed_"), prefixed("absdiff_")}) {
    t.columns.insert(t.columns.end(), names.begin(), names.end());
  }
  t.notes.push_back("support last_occupied=" + std::to_string(margin.last_occupied) +
                    " margin=" + std::to_string(margin.margin) +
                    " second_moments_trusted=" + (margin.second_moments_trusted ? "true" : "false"));

  double worst = 0.0;
  double e_lo = INFINITY;
  double e_hi = -INFINITY;
  for (double time : sample_times(c)) {
    const auto brute = averages_bruteforce(propagate_fock(initial, time, params), params);
    const auto closed = averages_closedform(label, time, params);
    const auto diff = io::absolute_difference(brute, closed);
    worst = std::max(worst, io::max_field(diff));
    e_lo = std::min(e_lo, brute.energy);
    e_hi = std::max(e_hi, brute.energy);
    std::vector<double> row = {time};
    append_fields(row, brute);
    append_fields(row, closed);
    append_fields(row, diff);
    t.rows.push_back(std::move(row));
  }
  t.footer["samples"] = t.rows.size();
  t.footer["max_abs_diff"] = worst;
  t.footer["energy_spread"] = e_hi - e_lo;
  t.footer["truncation_tail"] = truncation_tail(label, n_max);
  t.footer["support_margin"] = margin.margin;
  return t;
}

/// Occupation probabilities against the Poisson law, n = 0..n_max.
inline Table spectrum_table(const RunConfig& c, std::size_t n_max) {
  const auto label = c.label();
  const StateVector state = coherent_coefficients(label, n_max);
  Table t;
  t.columns = {"n", "probability", "poisson", "difference"};
  double total = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double p = std::norm(state.coeffs(static_cast<Eigen::Index>(n)));
    const double poisson = occupation_probability(label, n);
    total += p;
    t.rows.push_back({static_cast<double>(n), p, poisson, p - poisson});
  }
  t.footer["truncation_tail"] = truncation_tail(label, n_max);
  t.footer["probability_sum"] = total;
  return t;
}

/// Uncertainty product over time for the coherent state; Fock-level check in the footer.
inline Table uncertainty_table(const RunConfig& c, std::size_t n_max) {
  const auto params = c.params();
  const auto label = c.label();
  const StateVector initial = coherent_coefficients(label, n_max);
  Table t;
  t.columns = {"time", "variance_x", "variance_p", "uncertainty_bruteforce", "uncertainty_closedform", "abs_diff"};
  double worst = 0.0;
  double lowest = INFINITY;
  for (double time : sample_times(c)) {
    const auto brute = averages_bruteforce(propagate_fock(initial, time, params), params);
    const double closed = averages_closedform(label, time, params).uncertainty;
    const double diff = std::abs(brute.uncertainty - closed);
    worst = std::max(worst, diff);
    lowest = std::min(lowest, brute.uncertainty);
    t.rows.push_back({time, brute.variance_x(), brute.variance_p(), brute.uncertainty, closed, diff});
  }
  double fock_worst = 0.0;
  for (std::size_t n = 0; n + second_moment_margin <= n_max; ++n) {
    const double i_n = averages_bruteforce(fock_state(n, n_max), params).uncertainty;
    fock_worst = std::max(fock_worst, std::abs(i_n - uncertainty_fock(n, params)));
  }
  t.footer["hbar_over_2"] = params.hbar() / 2.0;
  t.footer["max_abs_diff"] = worst;
  t.footer["min_uncertainty"] = lowest;
  t.footer["fock_levels_checked"] = n_max >= second_moment_margin ? n_max - second_moment_margin + 1 : 0;
  t.footer["fock_max_abs_diff"] = fock_worst;
  return t;
}

inline constexpr std::size_t symmetry_angle_count = 16;

/// Averages before and after the phase rotation for 16 angles spanning one turn, at t = t_start.
inline Table symmetry_table(const RunConfig& c, std::size_t n_max) {
  const auto params = c.params();
  const auto label = c.label();
  const StateVector state = dynamical_coherent_state(label, c.t_start, params, n_max);
  const auto before = averages_bruteforce(state, params);
  const double e_classical = classical_energy(before.mean_x, before.mean_p, params);

  Table t;
  t.columns = {"alpha",       "a_avg_re",      "a_avg_im",      "rotated_a_avg_re",        "rotated_a_avg_im",
               "expected_re", "expected_im",   "n_avg",         "rotated_n_avg",           "energy",
               "rotated_energy", "classical_energy", "rotated_classical_energy"};
  double rotation = 0.0;
  double invariant = 0.0;
  double classical = 0.0;
  for (std::size_t k = 0; k < symmetry_angle_count; ++k) {
    const PhaseAngle alpha(2.0 * pi * static_cast<double>(k) / symmetry_angle_count);
    const auto after = averages_bruteforce(transform_state_phase(state, alpha), params);
    const complex expected = unit_phase(-alpha.alpha) * before.a_avg;
    const PhasePoint q = rotate_xp(before.mean_x, before.mean_p, alpha, params);
    const double e_rotated = classical_energy(q.x, q.p, params);
    rotation = std::max(rotation, std::abs(after.a_avg - expected));
    invariant = std::max({invariant, std::abs(after.n_avg - before.n_avg), std::abs(after.energy - before.energy)});
    classical = std::max(classical, std::abs(e_rotated - e_classical));
    t.rows.push_back({alpha.alpha, before.a_avg.real(), before.a_avg.imag(), after.a_avg.real(), after.a_avg.imag(),
                      expected.real(), expected.imag(), before.n_avg, after.n_avg, before.energy, after.energy,
                      e_classical, e_rotated});
  }
  t.footer["time"] = c.t_start;
  t.footer["max_rotation_error"] = rotation;
  t.footer["max_invariant_drift"] = invariant;
  t.footer["max_classical_energy_drift"] = classical;
  return t;
}

/// Series and closed-form packet on a grid following the mean position, at every sample time.
inline Table wavefunction_table(const RunConfig& c, std::size_t n_max) {
  const auto params = c.params();
  const auto label = c.label();
  const double target_variance = params.hbar() / (2.0 * params.mass() * params.omega());

  Table t;
  t.columns = {"time", "x", "re", "im", "abs2", "closed_re", "closed_im", "abs_diff"};
  ordered_json per_time = ordered_json::array();
  double worst = 0.0;
  double worst_norm = 0.0;
  double worst_variance = 0.0;
  for (double time : sample_times(c)) {
    const double center = averages_closedform(label, time, params).mean_x;
    const auto grid = default_grid(center, params, c.grid_halfwidth, c.grid_points);
    const auto series = psi_series_on(grid, label, time, params, n_max);
    double local = 0.0;
    for (const auto& s : series) {
      const complex closed = psi_closed(label, s.x, time, params).value;
      const double diff = std::abs(s.value - closed);
      local = std::max(local, diff);
      t.rows.push_back({time, s.x, s.value.real(), s.value.imag(), std::norm(s.value), closed.real(), closed.imag(),
                        diff});
    }
    const auto m = packet_moments(series, grid);
    worst = std::max(worst, local);
    worst_norm = std::max(worst_norm, std::abs(m.norm - 1.0));
    worst_variance = std::max(worst_variance, std::abs(m.variance - target_variance));
    ordered_json entry;
    entry["time"] = time;
    entry["norm"] = m.norm;
    entry["mean"] = m.mean;
    entry["variance"] = m.variance;
    entry["max_abs_diff"] = local;
    per_time.push_back(std::move(entry));
  }
  t.footer["expected_variance"] = target_variance;
  t.footer["max_abs_diff"] = worst;
  t.footer["max_norm_error"] = worst_norm;
  t.footer["max_variance_error"] = worst_variance;
  t.footer["per_time"] = std::move(per_time);
  return t;
}

inline Table build_table(const RunConfig& c, std::size_t n_max) {
  if (c.command == "trajectory") return trajectory_table(c, n_max);
  if (c.command == "spectrum") return spectrum_table(c, n_max);
  if (c.command == "uncertainty") return uncertainty_table(c, n_max);
  if (c.command == "symmetry-check") return symmetry_table(c, n_max);
  if (c.command == "wavefunction") return wavefunction_table(c, n_max);
  throw config_error("unknown command " + c.command);
}

inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / p;
  }
  return p;
}

/// Run a table-producing command and write its output. Returns the process exit code.
inline int run_table_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::size_t n_max = 0;
  Table table;
  try {
    validate(c);
    n_max = resolve_n_max(c);
    table = build_table(c, n_max);
  } catch (const config_error& e) {
    err << "qho: invalid configuration: " << e.what() << '\n';
    return usage_error;
  } catch (const std::domain_error& e) {
    // e.g. a state that is not normalized at the requested n_max
    err << "qho: invalid configuration: " << e.what() << '\n';
    return usage_error;
  }

  std::ostringstream buffer;
  if (c.format == "json") {
    write_json(buffer, c, n_max, table);
  } else {
    write_csv(buffer, c, n_max, table);
  }

  if (c.output_path.empty() || c.output_path == "-") {
    out << buffer.str();
    return out ? ok : io_error;
  }
  const auto path = resolve_output_path(c.output_path);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "qho: cannot open " << path.string() << " for writing\n";
    return io_error;
  }
  file << buffer.str();
  file.close();
  if (!file) {
    err << "qho: failed writing " << path.string() << '\n';
    return io_error;
  }
  return ok;
}

inline int run_verify(const RunConfig& c, bool configured, std::ostream& out, std::ostream& err) {
  verify::AcceptanceOptions options;
  options.seed = c.seed;
  try {
    validate(c);
    if (configured) options.configured = verify::ConfiguredCase{c.label(), resolve_n_max(c)};
  } catch (const config_error& e) {
    err << "qho: invalid configuration: " << e.what() << '\n';
    return usage_error;
  }
  const auto results = verify::run_acceptance(options);
  for (const auto& r : results) out << verify::format_result(r) << '\n';
  if (verify::all_passed(results)) {
    out << "all acceptance criteria passed\n";
    return ok;
  }
  for (const auto& r : results) {
    if (!r.passed) err << "qho: criterion " << r.id << " failed: " << r.name << '\n';
  }
  return verify_failed;
}

inline void add_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("--chi-re", c.chi_re, "real part of the coherent label chi")->capture_default_str();
  app.add_option("--chi-im", c.chi_im, "imaginary part of the coherent label chi")->capture_default_str();
  app.add_option("--hbar", c.hbar, "reduced Planck constant")->capture_default_str();
  app.add_option("--mass", c.mass, "oscillator mass M")->capture_default_str();
  app.add_option("--omega", c.omega, "angular frequency")->capture_default_str();
  app.add_option("--n-max", c.n_max, "Fock truncation level, or \"auto\"")->capture_default_str();
  app.add_option("--t-start", c.t_start, "first sample time")->capture_default_str();
  app.add_option("--t-end", c.t_end, "last sample time (inclusive)")->capture_default_str();
  app.add_option("--dt", c.dt, "sampling step")->capture_default_str();
  app.add_option("--grid-halfwidth", c.grid_halfwidth, "grid half-width in oscillator lengths")->capture_default_str();
  app.add_option("--grid-points", c.grid_points, "number of grid points (odd)")->capture_default_str();
  app.add_option("-o,--output-path", c.output_path, "output file (stdout when empty or -)");
  app.add_option("--format", c.format, "csv or json")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for randomized checks")->capture_default_str();
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical laboratory for the harmonic oscillator in dynamical coherent states", "qho"};
  app.require_subcommand(1);
  RunConfig config;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"trajectory", "time series of all averages, brute force vs closed form"},
      {"spectrum", "occupation probabilities against the Poisson law"},
      {"uncertainty", "uncertainty product over time and per Fock level"},
      {"wavefunction", "wave packet on a grid: Fock series vs closed form"},
      {"symmetry-check", "averages under the phase transformation"},
      {"verify", "run the acceptance suite; exit 3 on any failure"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    add_run_options(*sub, config);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e, out, err);
    return usage_error;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    config.command = commands[i].first;
    if (config.command == "verify") {
      const bool configured = subs[i]->count("--n-max") > 0 || subs[i]->count("--chi-re") > 0 ||
                              subs[i]->count("--chi-im") > 0;
      return run_verify(config, configured, out, err);
    }
    return run_table_command(config, out, err);
  }
  return usage_error;
}

}  // namespace qho::cli
