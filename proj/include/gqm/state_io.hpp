#pragma once

// Plain-text outputs: CSV series for plotting and JSON dumps of states.
//
//   series.csv        step,time,total_probability,mean_x,width
//   density.csv       time,x,density            (one row per snapshot and site)
//   distribution.csv  value,probability
//   convergence.csv   epsilon,n_sites,l2_distance,order
//
// State dump (JSON):
//   { "format": "gqm-state-v1", "dim": N, "time": t,
//     "grid": { "x_min": .., "x_max": .., "n_sites": .., "boundary": "periodic" },
//     "values": [ [re_00, im_00, re_01, im_01, ...], ... ] }   one row per site, row-major
//
// Propagator dump (text):
//   gqm-propagator v1
//   dim <N>
//   grid <x_min> <x_max> <n_sites> <boundary>
//   t <t_begin> <t_end>
//   <i> <j> <re_00> <im_00> ...      one line per nonzero site block
//
// Path file for Wilson lines: one "<t> <x>" pair per line, '#' comments.

#include "gqm/dynamics_path.hpp"
#include "gqm/dynamics_pde.hpp"
#include "gqm/measurement.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gqm {

std::string boundary_name(Boundary b);
Boundary parse_boundary(const std::string& name);

void write_series_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, const Grid1D& grid);
void write_density_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, const Grid1D& grid);
void write_distribution_csv(std::ostream& os, const MeasurementDistribution& dist);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

nlohmann::json state_to_json(const Wavefunction& psi);
Wavefunction state_from_json(const nlohmann::json& j);
void save_state(const std::filesystem::path& path, const Wavefunction& psi);
Wavefunction load_state(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Matrix& m);

void write_propagator(std::ostream& os, const PropagatorMatrix& p, double drop_below = 0.0);

LatticePath read_path(std::istream& is);
LatticePath load_path(const std::filesystem::path& path);

}  // namespace gqm
