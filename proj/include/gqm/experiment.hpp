#pragma once

// Declarative experiment description (JSON) and the runner behind `gqm run`.
// Every default is written back into the echoed config so a report is
// self-describing. See README.md for the full key list.

#include "gqm/dynamics_path.hpp"
#include "gqm/dynamics_pde.hpp"
#include "gqm/verify.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gqm {

struct ExperimentConfig {
  std::string group = "U(1)";  // U(1), SU(N) or U(N)

  double x_min = -20.0;
  double x_max = 20.0;
  int n_sites = 512;
  std::string boundary = "periodic";

  // zero | constant | gaussian_bump | random_smooth | file
  std::string field_family = "zero";
  std::vector<double> field_phi;  // basis coordinates (constant / gaussian_bump)
  std::vector<double> field_a;
  double field_center = 0.0;
  double field_width = 1.0;
  int field_modes = 3;
  double field_amplitude = 0.5;
  std::string field_file;

  double packet_center = 0.0;
  double packet_width = 1.0;
  double packet_momentum = 0.0;
  // "identity", "random", or 2 N^2 numbers (re, im, row-major)
  nlohmann::json packet_factor = "identity";
  std::string initial_file;

  std::string route = "pde";  // pde | path | both
  double mass = 1.0;
  double hbar = 1.0;
  double t_final = 1.0;

  double dt = 1e-2;
  std::string scheme = "crank-nicolson";  // or split-step
  double solve_tolerance = 1e-10;

  double epsilon = 1e-2;
  double window = 8.0;
  double eta = 1e-3;
  std::string resolution = "error";  // error | warn | ignore
  int convergence_levels = 3;

  int snapshot_every = 10;
  bool record_values = false;
  std::string output = "gqm-out";
  std::uint64_t seed = 1;
  int threads = 1;

  int dim() const;
  AlgebraBasis basis() const;
};

/// Parses and validates; throws ValidationError listing every violation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Collects all violations (empty when valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

GaugeField1D build_field(const ExperimentConfig& cfg);
Wavefunction build_initial_state(const ExperimentConfig& cfg, const Grid1D& grid);
Grid1D build_grid(const ExperimentConfig& cfg);

struct RouteSeries {
  std::string route;
  std::vector<Snapshot> snapshots;
  std::optional<Wavefunction> final_state;
};

struct RunReport {
  nlohmann::json config;
  std::vector<RouteSeries> series;
  std::optional<ConvergenceReport> convergence;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  bool failed = false;
  std::string failure;
};

/// Numeric failures are caught and recorded in the report.
RunReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const RunReport& report);

/// config.json, series_<route>.csv, density_<route>.csv,
/// final_state_<route>.json, convergence.csv, report.json.
void write_run_outputs(const RunReport& report, const Grid1D& grid, const std::filesystem::path& dir);

}  // namespace gqm
