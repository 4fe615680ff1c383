#include "gqm/state_io.hpp"

#include "gqm/errors.hpp"
#include "gqm/field_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gqm {

using nlohmann::json;

std::string boundary_name(Boundary b) { return b == Boundary::periodic ? "periodic" : "reflecting"; }

Boundary parse_boundary(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "reflecting") return Boundary::reflecting;
  throw ValidationError("unknown boundary '" + name + "' (expected periodic or reflecting)");
}

namespace {

Moments moments_of(const std::vector<double>& rho, const Grid1D& grid) {
  double m0 = 0, m1 = 0, m2 = 0;
  for (int j = 0; j < grid.n_sites(); ++j) {
    m0 += rho[j];
    m1 += rho[j] * grid.x(j);
  }
  if (!(m0 > 0.0)) return {0.0, 0.0};
  const double mean = m1 / m0;
  for (int j = 0; j < grid.n_sites(); ++j) m2 += rho[j] * (grid.x(j) - mean) * (grid.x(j) - mean);
  return {mean, std::sqrt(m2 / m0)};
}

}  // namespace

void write_series_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, const Grid1D& grid) {
  os << "step,time,total_probability,mean_x,width\n";
  for (const auto& s : snapshots) {
    const Moments m = moments_of(s.density, grid);
    os << s.step << ',' << format_double(s.time) << ',' << format_double(s.total_probability) << ','
       << format_double(m.mean) << ',' << format_double(m.width) << '\n';
  }
}

void write_density_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, const Grid1D& grid) {
  os << "time,x,density\n";
  for (const auto& s : snapshots) {
    for (int j = 0; j < grid.n_sites(); ++j) {
      os << format_double(s.time) << ',' << format_double(grid.x(j)) << ',' << format_double(s.density[j]) << '\n';
    }
  }
}

void write_distribution_csv(std::ostream& os, const MeasurementDistribution& dist) {
  os << "value,probability\n";
  for (const auto& o : dist.outcomes) os << format_double(o.value) << ',' << format_double(o.probability) << '\n';
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "epsilon,n_sites,l2_distance,order\n";
  for (std::size_t k = 0; k < report.levels.size(); ++k) {
    const auto& l = report.levels[k];
    os << format_double(l.epsilon) << ',' << l.n_sites << ',' << format_double(l.distance) << ',';
    if (k > 0) os << format_double(report.observed_orders[k - 1]);
    os << '\n';
  }
}

json matrix_to_json(const Matrix& m) {
  json row = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c).real());
      row.push_back(m(r, c).imag());
    }
  }
  return row;
}

json state_to_json(const Wavefunction& psi) {
  const Grid1D& g = psi.grid();
  json values = json::array();
  for (int j = 0; j < g.n_sites(); ++j) values.push_back(matrix_to_json(psi.block(j)));
  return {{"format", "gqm-state-v1"},
          {"dim", psi.dim()},
          {"time", psi.time()},
          {"grid",
           {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n_sites", g.n_sites()}, {"boundary", boundary_name(g.boundary())}}},
          {"values", values}};
}

Wavefunction state_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "gqm-state-v1") throw ValidationError("state: unknown format tag");
    const int dim = j.at("dim").get<int>();
    const json& gj = j.at("grid");
    const Grid1D grid(gj.at("x_min").get<double>(), gj.at("x_max").get<double>(), gj.at("n_sites").get<int>(),
                      parse_boundary(gj.value("boundary", std::string("periodic"))));
    const json& values = j.at("values");
    if (dim < 1) throw ValidationError("state: dim must be positive");
    if (static_cast<int>(values.size()) != grid.n_sites()) throw ValidationError("state: one value row per site expected");
    Matrix stacked(static_cast<Eigen::Index>(grid.n_sites()) * dim, dim);
    for (int s = 0; s < grid.n_sites(); ++s) {
      const json& row = values[s];
      if (static_cast<int>(row.size()) != 2 * dim * dim) throw ValidationError("state: wrong number of entries in a site row");
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
          const int k = 2 * (r * dim + c);
          stacked(s * dim + r, c) = Complex(row[k].get<double>(), row[k + 1].get<double>());
        }
      }
    }
    return Wavefunction(grid, std::move(stacked), j.at("time").get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("state: malformed JSON: ") + e.what());
  }
}

void save_state(const std::filesystem::path& path, const Wavefunction& psi) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path.string());
  os << state_to_json(psi).dump(1) << '\n';
}

Wavefunction load_state(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open state file " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return state_from_json(j);
}

void write_propagator(std::ostream& os, const PropagatorMatrix& p, double drop_below) {
  const Grid1D& g = p.grid();
  const int dim = p.dim();
  os << "gqm-propagator v1\n";
  os << "dim " << dim << '\n';
  os << "grid " << format_double(g.x_min()) << ' ' << format_double(g.x_max()) << ' ' << g.n_sites() << ' '
     << boundary_name(g.boundary()) << '\n';
  os << "t " << format_double(p.t_begin()) << ' ' << format_double(p.t_end()) << '\n';
  for (int i = 0; i < g.n_sites(); ++i) {
    for (int j = 0; j < g.n_sites(); ++j) {
      const Matrix b = p.block(i, j).matrix();
      if (b.cwiseAbs().maxCoeff() <= drop_below) continue;
      os << i << ' ' << j;
      for (Eigen::Index k = 0; k < b.size(); ++k) {
        const Complex z = b(k / dim, k % dim);
        os << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
      }
      os << '\n';
    }
  }
}

LatticePath read_path(std::istream& is) {
  std::vector<SpaceTimePoint> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    SpaceTimePoint p;
    if (!(ls >> p.t)) continue;
    std::string extra;
    if (!(ls >> p.x) || (ls >> extra)) {
      throw ValidationError("path file line " + std::to_string(line_no) + ": expected '<t> <x>'");
    }
    pts.push_back(p);
  }
  try {
    return LatticePath(std::move(pts));
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("path file: ") + e.what());
  }
}

LatticePath load_path(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open path file " + path.string());
  return read_path(is);
}

}  // namespace gqm
