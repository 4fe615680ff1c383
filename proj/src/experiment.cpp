#include "gqm/experiment.hpp"

#include "gqm/errors.hpp"
#include "gqm/field_io.hpp"
#include "gqm/state_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace gqm {

using nlohmann::json;

namespace {

struct GroupLabel {
  bool special;
  int n;
};

std::optional<GroupLabel> parse_group(const std::string& label) {
  static const std::regex re(R"((S?)U\((\d+)\))");
  std::smatch m;
  if (!std::regex_match(label, m, re)) return std::nullopt;
  const int n = std::stoi(m[2].str());
  const bool special = !m[1].str().empty();
  if (n < 1 || n > 16 || (special && n < 2)) return std::nullopt;
  return GroupLabel{special, n};
}

// Reads keys out of a JSON object, recording problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <class T>
  void read(const json& obj, const std::string& section, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where(section, key) + ": wrong type");
    }
  }

  void known(const json& obj, const std::string& section, const std::set<std::string>& keys) {
    if (!obj.is_object()) {
      errors_.push_back((section.empty() ? std::string("config") : section) + ": expected an object");
      return;
    }
    for (const auto& [k, v] : obj.items()) {
      if (!keys.count(k)) errors_.push_back(where(section, k.c_str()) + ": unknown key");
    }
  }

  const json& section(const json& root, const char* key) {
    static const json empty = json::object();
    return root.contains(key) ? root.at(key) : empty;
  }

 private:
  static std::string where(const std::string& section, const char* key) {
    return section.empty() ? std::string(key) : section + "." + key;
  }
  std::vector<std::string>& errors_;
};

}  // namespace

int ExperimentConfig::dim() const {
  const auto g = parse_group(group);
  if (!g) throw ValidationError("unknown group '" + group + "'");
  return g->n;
}

AlgebraBasis ExperimentConfig::basis() const {
  const auto g = parse_group(group);
  if (!g) throw ValidationError("unknown group '" + group + "'");
  return g->special ? su_basis(g->n) : u_basis(g->n);
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  Reader r(errors);
  r.known(j, "", {"group", "grid", "field", "initial", "route", "mass", "hbar", "t_final", "pde", "path", "output", "seed", "threads"});
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");

  r.read(j, "", "group", c.group);
  r.read(j, "", "route", c.route);
  r.read(j, "", "mass", c.mass);
  r.read(j, "", "hbar", c.hbar);
  r.read(j, "", "t_final", c.t_final);
  r.read(j, "", "seed", c.seed);
  r.read(j, "", "threads", c.threads);

  const json& grid = r.section(j, "grid");
  r.known(grid, "grid", {"x_min", "x_max", "n_sites", "boundary"});
  r.read(grid, "grid", "x_min", c.x_min);
  r.read(grid, "grid", "x_max", c.x_max);
  r.read(grid, "grid", "n_sites", c.n_sites);
  r.read(grid, "grid", "boundary", c.boundary);

  const json& field = r.section(j, "field");
  r.known(field, "field", {"family", "phi", "a", "center", "width", "modes", "amplitude", "file"});
  r.read(field, "field", "family", c.field_family);
  r.read(field, "field", "phi", c.field_phi);
  r.read(field, "field", "a", c.field_a);
  r.read(field, "field", "center", c.field_center);
  r.read(field, "field", "width", c.field_width);
  r.read(field, "field", "modes", c.field_modes);
  r.read(field, "field", "amplitude", c.field_amplitude);
  r.read(field, "field", "file", c.field_file);

  const json& init = r.section(j, "initial");
  r.known(init, "initial", {"center", "width", "momentum", "factor", "file"});
  r.read(init, "initial", "center", c.packet_center);
  r.read(init, "initial", "width", c.packet_width);
  r.read(init, "initial", "momentum", c.packet_momentum);
  if (init.contains("factor")) c.packet_factor = init.at("factor");
  r.read(init, "initial", "file", c.initial_file);

  const json& pde = r.section(j, "pde");
  r.known(pde, "pde", {"dt", "scheme", "solve_tolerance"});
  r.read(pde, "pde", "dt", c.dt);
  r.read(pde, "pde", "scheme", c.scheme);
  r.read(pde, "pde", "solve_tolerance", c.solve_tolerance);

  const json& path = r.section(j, "path");
  r.known(path, "path", {"epsilon", "window", "eta", "resolution", "convergence_levels"});
  r.read(path, "path", "epsilon", c.epsilon);
  r.read(path, "path", "window", c.window);
  r.read(path, "path", "eta", c.eta);
  r.read(path, "path", "resolution", c.resolution);
  r.read(path, "path", "convergence_levels", c.convergence_levels);

  const json& out = r.section(j, "output");
  r.known(out, "output", {"directory", "snapshot_every", "record_values"});
  r.read(out, "output", "directory", c.output);
  r.read(out, "output", "snapshot_every", c.snapshot_every);
  r.read(out, "output", "record_values", c.record_values);

  const auto more = validate_config(c);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid config (" << errors.size() << (errors.size() == 1 ? " problem" : " problems") << "):";
    for (const auto& e : errors) os << "\n  - " << e;
    throw ValidationError(os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  const auto group = parse_group(c.group);
  if (!group) errors.push_back("group: expected U(1), SU(N) with N >= 2, or U(N); got '" + c.group + "'");
  if (!(c.x_max > c.x_min)) errors.push_back("grid: x_max must exceed x_min");
  if (c.n_sites < 8) errors.push_back("grid.n_sites: must be at least 8");
  if (c.boundary != "periodic" && c.boundary != "reflecting") errors.push_back("grid.boundary: periodic or reflecting");
  if (c.route != "pde" && c.route != "path" && c.route != "both") errors.push_back("route: pde, path or both");
  if (!(c.mass > 0.0)) errors.push_back("mass: must be positive");
  if (!(c.hbar > 0.0)) errors.push_back("hbar: must be positive");
  if (!(c.t_final >= 0.0)) errors.push_back("t_final: must be non-negative");
  if (!(c.dt > 0.0)) errors.push_back("pde.dt: must be positive");
  if (c.scheme != "crank-nicolson" && c.scheme != "split-step") errors.push_back("pde.scheme: crank-nicolson or split-step");
  if (!(c.solve_tolerance > 0.0 && c.solve_tolerance <= 1e-6)) errors.push_back("pde.solve_tolerance: must lie in (0, 1e-6]");
  if (!(c.epsilon > 0.0)) errors.push_back("path.epsilon: must be positive");
  if (!(c.window >= 5.0)) errors.push_back("path.window: must be at least 5");
  if (!(c.eta >= 0.0 && c.eta <= 0.1)) errors.push_back("path.eta: must lie in [0, 0.1]");
  if (c.resolution != "error" && c.resolution != "warn" && c.resolution != "ignore") {
    errors.push_back("path.resolution: error, warn or ignore");
  }
  if (c.convergence_levels < 2 || c.convergence_levels > 6) errors.push_back("path.convergence_levels: between 2 and 6");
  if (c.snapshot_every < 0) errors.push_back("output.snapshot_every: must be non-negative");
  if (c.threads < 1) errors.push_back("threads: must be positive");
  if (!(c.packet_width > 0.0)) errors.push_back("initial.width: must be positive");

  static const std::set<std::string> families{"zero", "constant", "gaussian_bump", "random_smooth", "file"};
  if (!families.count(c.field_family)) {
    errors.push_back("field.family: zero, constant, gaussian_bump, random_smooth or file");
  }
  if (group) {
    const int n = group->n;
    const int generators = group->special ? n * n - 1 : n * n;
    if ((c.field_family == "constant" || c.field_family == "gaussian_bump")) {
      for (const auto* v : {&c.field_phi, &c.field_a}) {
        if (!v->empty() && static_cast<int>(v->size()) != generators) {
          errors.push_back("field." + std::string(v == &c.field_phi ? "phi" : "a") + ": expected " +
                           std::to_string(generators) + " basis coordinates for " + c.group);
        }
      }
    }
    const json& f = c.packet_factor;
    if (f.is_string()) {
      if (f != "identity" && f != "random") errors.push_back("initial.factor: identity, random or a list of numbers");
    } else if (!f.is_array() || static_cast<int>(f.size()) != 2 * n * n ||
               !std::all_of(f.begin(), f.end(), [](const json& v) { return v.is_number(); })) {
      errors.push_back("initial.factor: expected " + std::to_string(2 * n * n) + " numbers (re, im, row-major)");
    }
  }
  if (c.field_family == "gaussian_bump" && !(c.field_width > 0.0)) errors.push_back("field.width: must be positive");
  if (c.field_family == "random_smooth" && c.field_modes < 1) errors.push_back("field.modes: must be positive");
  if (c.field_family == "file") {
    if (c.field_file.empty()) {
      errors.push_back("field.file: required for family 'file'");
    } else if (!std::filesystem::exists(c.field_file)) {
      errors.push_back("field.file: " + c.field_file + " does not exist");
    }
  }
  if (!c.initial_file.empty() && !std::filesystem::exists(c.initial_file)) {
    errors.push_back("initial.file: " + c.initial_file + " does not exist");
  }
  if (c.scheme == "split-step" && c.route != "path") {
    if (c.boundary != "periodic") errors.push_back("pde.scheme: split-step needs a periodic grid");
    if (c.field_family != "zero" && !(c.field_family == "constant" || c.field_family == "gaussian_bump")) {
      errors.push_back("pde.scheme: split-step supports only fields with a = 0");
    } else if (std::any_of(c.field_a.begin(), c.field_a.end(), [](double v) { return v != 0.0; })) {
      errors.push_back("pde.scheme: split-step supports only fields with a = 0");
    }
  }

  if ((c.route == "path" || c.route == "both") && c.epsilon > 0 && c.mass > 0 && c.hbar > 0 && c.n_sites >= 8 &&
      c.x_max > c.x_min) {
    const double dx = (c.x_max - c.x_min) / c.n_sites;
    const double sigma = std::sqrt(c.epsilon * c.hbar / c.mass);
    if (c.resolution == "error" && dx > sigma / 4 * (1 + 1e-12)) {
      std::ostringstream os;
      os << "path: grid spacing " << dx << " exceeds sigma/4 = " << sigma / 4 << " for epsilon " << c.epsilon
         << "; raise grid.n_sites to at least " << static_cast<int>(std::ceil((c.x_max - c.x_min) / (sigma / 4)))
         << " or increase path.epsilon to at least " << 16 * dx * dx * c.mass / c.hbar;
      errors.push_back(os.str());
    }
    const double ratio = c.t_final / c.epsilon;
    if (c.t_final > 0 && std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      errors.push_back("path: t_final must be an integer multiple of path.epsilon");
    }
  }
  return errors;
}

json config_to_json(const ExperimentConfig& c) {
  return {{"group", c.group},
          {"grid", {{"x_min", c.x_min}, {"x_max", c.x_max}, {"n_sites", c.n_sites}, {"boundary", c.boundary}}},
          {"field",
           {{"family", c.field_family},
            {"phi", c.field_phi},
            {"a", c.field_a},
            {"center", c.field_center},
            {"width", c.field_width},
            {"modes", c.field_modes},
            {"amplitude", c.field_amplitude},
            {"file", c.field_file}}},
          {"initial",
           {{"center", c.packet_center},
            {"width", c.packet_width},
            {"momentum", c.packet_momentum},
            {"factor", c.packet_factor},
            {"file", c.initial_file}}},
          {"route", c.route},
          {"mass", c.mass},
          {"hbar", c.hbar},
          {"t_final", c.t_final},
          {"pde", {{"dt", c.dt}, {"scheme", c.scheme}, {"solve_tolerance", c.solve_tolerance}}},
          {"path",
           {{"epsilon", c.epsilon},
            {"window", c.window},
            {"eta", c.eta},
            {"resolution", c.resolution},
            {"convergence_levels", c.convergence_levels}}},
          {"output", {{"directory", c.output}, {"snapshot_every", c.snapshot_every}, {"record_values", c.record_values}}},
          {"seed", c.seed},
          {"threads", c.threads}};
}

Grid1D build_grid(const ExperimentConfig& c) {
  return Grid1D(c.x_min, c.x_max, c.n_sites, parse_boundary(c.boundary));
}

GaugeField1D build_field(const ExperimentConfig& c) {
  const AlgebraBasis basis = c.basis();
  auto coords = [&](const std::vector<double>& v) {
    return v.empty() ? AlgebraElement::zero(basis.dim()) : basis.combine(v);
  };
  if (c.field_family == "zero") return GaugeField1D::zero(c.dim());
  if (c.field_family == "constant") return GaugeField1D::constant(coords(c.field_phi), coords(c.field_a));
  if (c.field_family == "gaussian_bump") {
    return GaugeField1D::gaussian_bump(coords(c.field_phi), coords(c.field_a), c.field_center, c.field_width);
  }
  if (c.field_family == "random_smooth") {
    // offset so the field and a random initial factor use different streams
    std::mt19937_64 rng(c.seed * 2 + 1);
    return GaugeField1D::random_smooth(basis, c.x_min, c.x_max, c.field_modes, c.field_amplitude, rng);
  }
  const TabulatedField table = load_tabulated_field(c.field_file);
  if (table.dim != c.dim()) throw ValidationError("field file dimension does not match group " + c.group);
  return table.to_field();
}

Wavefunction build_initial_state(const ExperimentConfig& c, const Grid1D& grid) {
  if (!c.initial_file.empty()) {
    Wavefunction psi = load_state(c.initial_file);
    if (!(psi.grid() == grid) || psi.dim() != c.dim()) {
      throw ValidationError("initial.file: state grid or dimension differs from the config");
    }
    return psi;
  }
  const int n = c.dim();
  Matrix factor = Matrix::Identity(n, n);
  if (c.packet_factor == "random") {
    std::mt19937_64 rng(c.seed * 2);
    factor = random_group_algebra_element(n, rng).matrix();
  } else if (c.packet_factor.is_array()) {
    for (int k = 0; k < n * n; ++k) {
      factor(k / n, k % n) = Complex(c.packet_factor[2 * k].get<double>(), c.packet_factor[2 * k + 1].get<double>());
    }
  }
  return Wavefunction::gaussian_packet(grid, c.packet_center, c.packet_width, c.packet_momentum,
                                       GroupAlgebraElement(factor));
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EvolutionConfig pde_config(const ExperimentConfig& c) {
  EvolutionConfig e;
  e.mass = c.mass;
  e.hbar = c.hbar;
  e.dt = c.dt;
  e.scheme = c.scheme == "split-step" ? Scheme::split_step : Scheme::crank_nicolson;
  e.solve_tolerance = c.solve_tolerance;
  return e;
}

KernelConfig kernel_config(const ExperimentConfig& c) {
  KernelConfig k;
  k.epsilon = c.epsilon;
  k.window = c.window;
  k.eta = c.eta;
  k.threads = c.threads;
  k.resolution = c.resolution == "error" ? ResolutionPolicy::error
                 : c.resolution == "warn" ? ResolutionPolicy::warn
                                          : ResolutionPolicy::ignore;
  return k;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& c) {
  RunReport report;
  report.config = config_to_json(c);
  const auto started = std::chrono::steady_clock::now();
  const Grid1D grid = build_grid(c);
  const GaugeField1D field = build_field(c);
  const Wavefunction psi0 = build_initial_state(c, grid);
  EvolveOptions opts;
  opts.snapshot_every = c.snapshot_every;
  opts.record_values = c.record_values;
  const double n0 = total_probability(psi0);

  try {
    if (c.route == "pde" || c.route == "both") {
      const auto t0 = std::chrono::steady_clock::now();
      auto traj = evolve(psi0, field, pde_config(c), c.t_final, {}, opts);
      report.timings.emplace_back("pde", seconds_since(t0));
      const double drift = std::abs(total_probability(traj.final_state) - n0) / n0;
      report.checks.push_back({"pde norm drift", drift < 1e-8, drift, 1e-8, "<"});

      // free packet: compare with the analytic width law while the packet is
      // far from the boundary
      if (c.field_family == "zero" && c.initial_file.empty() && c.t_final > 0) {
        const double s0 = c.packet_width;
        const double s = s0 * std::sqrt(1 + std::pow(c.hbar * c.t_final / (2 * c.mass * s0 * s0), 2));
        const double drift_x = c.hbar * c.packet_momentum / c.mass * c.t_final;
        const double centre = c.packet_center + drift_x;
        if (centre - 10 * s >= c.x_min && centre + 10 * s <= c.x_max) {
          const double rel = std::abs(position_moments(traj.final_state).width / s - 1);
          report.checks.push_back({"pde free width law", rel < 5e-3, rel, 5e-3, "<"});
        }
      }
      report.series.push_back({"pde", std::move(traj.snapshots), std::move(traj.final_state)});
    }
    if (c.route == "path" || c.route == "both") {
      const auto t0 = std::chrono::steady_clock::now();
      auto traj = evolve_path(psi0, field, kernel_config(c), c.mass, c.hbar, c.t_final, {}, opts);
      report.timings.emplace_back("path", seconds_since(t0));
      report.series.push_back({"path", std::move(traj.snapshots), std::move(traj.final_state)});
    }
    if (c.route == "both" && c.t_final > 0) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<Resolution> levels;
      for (int k = 0; k < c.convergence_levels; ++k) {
        levels.push_back({c.epsilon / (1 << k), Grid1D(c.x_min, c.x_max, c.n_sites << k, parse_boundary(c.boundary))});
      }
      const ExperimentConfig copy = c;
      const auto report_levels = compare_with_pde(
          [&copy](const Grid1D& g) { return build_initial_state(copy, g); }, field, c.mass, c.hbar, c.t_final, levels,
          kernel_config(c));
      report.timings.emplace_back("convergence", seconds_since(t0));
      bool finite = true;
      for (const auto& l : report_levels.levels) finite = finite && std::isfinite(l.distance);
      const bool ok = finite && report_levels.monotone();
      report.checks.push_back({"path vs pde distance decreasing", ok, report_levels.levels.back().distance,
                               report_levels.levels.front().distance, "<"});
      report.convergence = report_levels;
    }
  } catch (const NumericError& e) {
    report.failed = true;
    report.failure = e.what();
  } catch (const SolverError& e) {
    report.failed = true;
    report.failure = e.what();
  }
  report.timings.emplace_back("total", seconds_since(started));
  return report;
}

json report_to_json(const RunReport& report) {
  json checks = json::array();
  for (const auto& ch : report.checks) {
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"measured", ch.measured}, {"relation", ch.relation}, {"threshold", ch.threshold}});
  }
  json series = json::object();
  for (const auto& s : report.series) {
    json rows = json::array();
    for (const auto& snap : s.snapshots) {
      rows.push_back({{"step", snap.step}, {"time", snap.time}, {"total_probability", snap.total_probability}});
    }
    series[s.route] = rows;
  }
  json timings = json::object();
  for (const auto& [k, v] : report.timings) timings[k] = v;
  json out = {{"config", report.config}, {"series", series}, {"checks", checks}, {"timings", timings},
              {"failed", report.failed}};
  if (report.failed) out["failure"] = report.failure;
  if (report.convergence) {
    json levels = json::array();
    for (std::size_t k = 0; k < report.convergence->levels.size(); ++k) {
      const auto& l = report.convergence->levels[k];
      json row = {{"epsilon", l.epsilon}, {"n_sites", l.n_sites}, {"l2_distance", l.distance}};
      if (k > 0) row["order"] = report.convergence->observed_orders[k - 1];
      levels.push_back(row);
    }
    out["convergence"] = levels;
  }
  return out;
}

void write_run_outputs(const RunReport& report, const Grid1D& grid, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw ValidationError("cannot write " + (dir / name).string());
    return os;
  };
  open("config.json") << report.config.dump(2) << '\n';
  for (const auto& s : report.series) {
    auto series = open("series_" + s.route + ".csv");
    write_series_csv(series, s.snapshots, grid);
    auto dens = open("density_" + s.route + ".csv");
    write_density_csv(dens, s.snapshots, grid);
    if (s.final_state) save_state(dir / ("final_state_" + s.route + ".json"), *s.final_state);
  }
  if (report.convergence) {
    auto conv = open("convergence.csv");
    write_convergence_csv(conv, *report.convergence);
  }
  open("report.json") << report_to_json(report).dump(2) << '\n';
}

}  // namespace gqm
