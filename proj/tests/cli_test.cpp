#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qho_cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qho");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = qho::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    ADD_FAILURE() << "missing column " << name;
    return 0;
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    EXPECT_FALSE(line.empty());
    EXPECT_EQ(line.back(), '\r');
    line.pop_back();
    if (line.rfind('#', 0) == 0) {
      csv.comments.push_back(line);
    } else if (csv.columns.empty()) {
      csv.columns = split(line, ',');
    } else {
      std::vector<double> row;
      for (const auto& cell : split(line, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
      csv.rows.push_back(std::move(row));
    }
  }
  return csv;
}

/// key=value pairs from every "# footer" comment line, later lines overriding earlier ones.
std::map<std::string, double> footer_values(const Csv& csv) {
  std::map<std::string, double> out;
  for (const auto& c : csv.comments) {
    if (c.rfind("# footer ", 0) != 0) continue;
    for (const auto& kv : split(c.substr(9), ' ')) {
      const auto eq = kv.find('=');
      if (eq != std::string::npos) out[kv.substr(0, eq)] = std::strtod(kv.c_str() + eq + 1, nullptr);
    }
  }
  return out;
}

std::vector<std::map<std::string, double>> per_time_footers(const Csv& csv) {
  std::vector<std::map<std::string, double>> out;
  for (const auto& c : csv.comments) {
    if (c.rfind("# footer per_time ", 0) != 0) continue;
    std::map<std::string, double> entry;
    for (const auto& kv : split(c.substr(18), ' ')) {
      const auto eq = kv.find('=');
      entry[kv.substr(0, eq)] = std::strtod(kv.c_str() + eq + 1, nullptr);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

TEST(Cli, NoCommandIsUsageError) { EXPECT_EQ(run({}).code, 1); }

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, InvalidConfigsAreUsageErrors) {
  EXPECT_EQ(run({"trajectory", "--dt", "0"}).code, 1);
  EXPECT_EQ(run({"trajectory", "--t-start", "1", "--t-end", "0"}).code, 1);
  EXPECT_EQ(run({"wavefunction", "--grid-points", "2000"}).code, 1);
  EXPECT_EQ(run({"wavefunction", "--grid-points", "1"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--n-max", "-3"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--n-max", "many"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--mass", "0"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--format", "xml"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--bogus"}).code, 1);
}

TEST(Cli, UnwritablePathIsIoError) {
  const auto r = run({"spectrum", "--output-path", "/nonexistent-dir/qho/out.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, WritesFileAndHonoursOutputDir) {
  const auto dir = std::filesystem::temp_directory_path() / "qho_cli_test";
  std::filesystem::create_directories(dir);
  ::setenv(qho::cli::output_dir_env, dir.c_str(), 1);
  const auto r = run({"spectrum", "--output-path", "spectrum.csv"});
  ::unsetenv(qho::cli::output_dir_env);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream file(dir / "spectrum.csv", std::ios::binary);
  std::stringstream contents;
  contents << file.rdbuf();
  EXPECT_EQ(contents.str(), run({"spectrum"}).out);
  std::filesystem::remove_all(dir);
}

TEST(Cli, IdenticalConfigsAreByteIdentical) {
  for (const std::string cmd : {"trajectory", "spectrum", "uncertainty", "symmetry-check"}) {
    for (const std::string fmt : {"csv", "json"}) {
      const std::vector<std::string> args = {cmd, "--chi-re", "0.8", "--chi-im", "-1.3", "--format", fmt, "--seed", "9"};
      const auto first = run(args);
      const auto second = run(args);
      ASSERT_EQ(first.code, 0) << cmd << ' ' << first.err;
      EXPECT_EQ(first.out, second.out) << cmd;
    }
  }
}

TEST(Cli, CellsHaveSeventeenSignificantDigits) {
  const auto csv = parse_csv(run({"trajectory", "--chi-re", "1", "--t-end", "1"}).out);
  ASSERT_FALSE(csv.rows.empty());
  const std::string text = run({"trajectory", "--chi-re", "1", "--t-end", "1"}).out;
  EXPECT_NE(text.find(",1.4142135623730951,"), std::string::npos);
  // every cell parses back to the value that was written
  for (const auto& row : csv.rows) {
    for (double v : row) EXPECT_EQ(std::strtod(qho::io::format_number(v).c_str(), nullptr), v);
  }
}

TEST(CliTrajectory, GroundStateColumns) {
  const auto csv = parse_csv(run({"trajectory", "--chi-re", "0"}).out);
  ASSERT_FALSE(csv.rows.empty());
  for (const auto& row : csv.rows) {
    EXPECT_EQ(row[csv.column("mean_x")], 0.0);
    EXPECT_EQ(row[csv.column("mean_p")], 0.0);
    EXPECT_NEAR(row[csv.column("uncertainty")], 0.5, 1e-15);
    EXPECT_EQ(row[csv.column("closed_uncertainty")], 0.5);
  }
}

TEST(CliTrajectory, OnePeriodReturnsToStart) {
  const auto csv = parse_csv(run({"trajectory", "--chi-re", "1", "--t-end", "6.283185307179586",
                                  "--dt", "0.19634954084936207"})
                                 .out);
  ASSERT_EQ(csv.rows.size(), 33u);
  const auto x = csv.column("mean_x");
  EXPECT_NEAR(csv.rows.front()[x], std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(csv.rows.back()[csv.column("time")], 2.0 * qho::pi, 1e-12);
  EXPECT_NEAR(csv.rows.back()[x], std::sqrt(2.0), 1e-9);
}

TEST(CliTrajectory, EnergyColumnConstant) {
  const auto csv = parse_csv(run({"trajectory", "--chi-re", "1.2", "--chi-im", "0.7", "--omega", "1.5"}).out);
  const auto e = csv.column("energy");
  for (const auto& row : csv.rows) EXPECT_NEAR(row[e], csv.rows.front()[e], 1e-10);
}

TEST(CliTrajectory, ClosedAndBruteForceAgree) {
  const auto csv = parse_csv(run({"trajectory", "--chi-re", "-1.5", "--chi-im", "0.5"}).out);
  EXPECT_LT(footer_values(csv).at("max_abs_diff"), 1e-9);
  for (const auto& name : csv.columns) {
    if (name.rfind("absdiff_", 0) != 0) continue;
    for (const auto& row : csv.rows) EXPECT_LT(row[csv.column(name)], 1e-9) << name;
  }
}

TEST(CliSpectrum, GroundStateSingleRow) {
  const auto csv = parse_csv(run({"spectrum", "--chi-re", "0"}).out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][csv.column("probability")], 1.0);
}

TEST(CliSpectrum, PoissonRowAndPartition) {
  const auto csv = parse_csv(run({"spectrum", "--chi-re", "0.6", "--chi-im", "0.8"}).out);
  ASSERT_GT(csv.rows.size(), 1u);
  EXPECT_NEAR(csv.rows[1][csv.column("probability")], 0.36787944117144233, 1e-15);
  const auto footer = footer_values(csv);
  EXPECT_NEAR(footer.at("probability_sum"), 1.0 - footer.at("truncation_tail"), 1e-12);
  double sum = 0.0;
  for (const auto& row : csv.rows) sum += row[csv.column("probability")];
  EXPECT_NEAR(sum, 1.0 - footer.at("truncation_tail"), 1e-12);
}

TEST(CliSpectrum, ConfigHeaderRecordsResolvedNMax) {
  const auto csv = parse_csv(run({"spectrum", "--chi-re", "1"}).out);
  bool found = false;
  for (const auto& c : csv.comments) found = found || c.find("n_max=auto resolved_n_max=14") != std::string::npos;
  EXPECT_TRUE(found);
  EXPECT_EQ(csv.rows.size(), 15u);
}

TEST(CliUncertainty, MinimalForCoherentState) {
  const auto csv = parse_csv(run({"uncertainty", "--chi-re", "1", "--chi-im", "1"}).out);
  for (const auto& row : csv.rows) EXPECT_NEAR(row[csv.column("uncertainty_bruteforce")], 0.5, 1e-9);
  EXPECT_LT(footer_values(csv).at("fock_max_abs_diff"), 1e-10);
}

TEST(CliSymmetry, SixteenAnglesAndInvariants) {
  const auto csv = parse_csv(run({"symmetry-check", "--chi-re", "1", "--chi-im", "-0.5"}).out);
  EXPECT_EQ(csv.rows.size(), qho::cli::symmetry_angle_count);
  const auto footer = footer_values(csv);
  EXPECT_LT(footer.at("max_rotation_error"), 1e-12);
  EXPECT_LT(footer.at("max_invariant_drift"), 1e-12);
  EXPECT_LT(footer.at("max_classical_energy_drift"), 1e-12);
}

TEST(CliWavefunction, DefaultConfigFooter) {
  const auto csv = parse_csv(run({"wavefunction", "--t-end", "3", "--dt", "1"}).out);
  EXPECT_EQ(csv.rows.size(), 4u * qho::default_grid_points);
  const auto footer = footer_values(csv);
  EXPECT_LT(footer.at("max_abs_diff"), 1e-8);
  const auto per_time = per_time_footers(csv);
  ASSERT_EQ(per_time.size(), 4u);
  for (const auto& entry : per_time) {
    EXPECT_NEAR(entry.at("variance"), 0.5, 1e-8);
    EXPECT_NEAR(entry.at("norm"), 1.0, 1e-8);
  }
}

TEST(CliWavefunction, NonNaturalUnitsVariance) {
  const auto csv = parse_csv(run({"wavefunction", "--chi-re", "-1", "--chi-im", "1.5", "--mass", "2", "--omega",
                                  "0.5", "--hbar", "0.3", "--t-end", "1", "--dt", "0.5", "--grid-points", "801"})
                                 .out);
  for (const auto& entry : per_time_footers(csv)) EXPECT_NEAR(entry.at("variance"), 0.15, 1e-8);
}

TEST(CliJson, StructureAndValues) {
  const auto r = run({"spectrum", "--chi-re", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("config").at("resolved_n_max").get<int>(), 14);
  EXPECT_EQ(j.at("rows").size(), 15u);
  EXPECT_DOUBLE_EQ(j.at("rows")[1].at("probability").get<double>(), 0.36787944117144233);
  EXPECT_TRUE(j.at("footer").contains("truncation_tail"));
}

TEST(CliVerify, DefaultRunPasses) {
  const auto r = run({"verify"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("all acceptance criteria passed"), std::string::npos);
}

TEST(CliVerify, UnderTruncationFailsNamingCriterion) {
  const auto r = run({"verify", "--chi-re", "3", "--n-max", "4"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("truncation"), std::string::npos);
  EXPECT_NE(r.out.find("[FAIL] 8"), std::string::npos);
}

TEST(CliVerify, SeedIsReproducible) {
  EXPECT_EQ(run({"verify", "--seed", "77"}).out, run({"verify", "--seed", "77"}).out);
}

}  // namespace
