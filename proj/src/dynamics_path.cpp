#include "gqm/dynamics_path.hpp"

#include "gqm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

namespace gqm {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Roll-off of the quadrature window: erfc centred at 0.65 * window with width
// 0.8 sigma. Tuned so the zeroth and second moments of the lattice kernel
// match their continuum values to ~1e-4 / ~1e-2 at window 8 and ~1e-10 /
// ~1e-8 at window 16.
constexpr double kTaperCentre = 0.65;
constexpr double kTaperWidth = 0.8;

int integer_steps(double span, double epsilon, const char* what) {
  const double ratio = span / epsilon;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    std::ostringstream os;
    os << what << ": time span " << span << " is not a positive integer multiple of epsilon " << epsilon;
    throw InvalidArgument(os.str());
  }
  return static_cast<int>(rounded);
}

void check_resolution(const Grid1D& grid, const KernelConfig& cfg, double m, double hbar) {
  if (cfg.resolution == ResolutionPolicy::ignore || kernel_resolved(grid, cfg.epsilon, m, hbar)) return;
  const double sigma = kernel_width(cfg.epsilon, m, hbar);
  std::ostringstream os;
  os << "grid spacing " << grid.spacing() << " exceeds sigma/4 = " << sigma / 4
     << " (sigma = sqrt(eps hbar / m)); use at least "
     << static_cast<int>(std::ceil(grid.length() / (sigma / 4))) << " sites or a larger epsilon";
  if (cfg.resolution == ResolutionPolicy::error) throw ResolutionError(os.str());
  static thread_local bool warned = false;
  if (!warned) {
    std::cerr << "warning: " << os.str() << "\n";
    warned = true;
  }
}

}  // namespace

void KernelConfig::validate() const {
  std::ostringstream errors;
  if (!(epsilon > 0.0)) errors << " epsilon must be positive;";
  if (!(window >= 5.0)) errors << " window must be at least 5;";
  if (!(eta >= 0.0 && eta <= 0.1)) errors << " eta must lie in [0, 0.1];";
  if (normalization && !(std::isfinite(normalization->real()) && std::isfinite(normalization->imag()))) {
    errors << " normalization must be finite;";
  }
  if (threads < 1) errors << " threads must be positive;";
  if (!errors.str().empty()) throw ValidationError("KernelConfig:" + errors.str());
}

Complex analytic_normalization(double epsilon, double m, double hbar) {
  // sqrt(1/i) = exp(-i pi / 4)
  return std::sqrt(m / (2.0 * std::numbers::pi * hbar * epsilon)) *
         std::polar(1.0, -std::numbers::pi / 4.0);
}

double kernel_width(double epsilon, double m, double hbar) { return std::sqrt(epsilon * hbar / m); }

double window_weight(double scaled_distance, double window) {
  const double a = std::abs(scaled_distance);
  if (a >= window) return 0.0;
  return 0.5 * std::erfc((a - kTaperCentre * window) / (std::numbers::sqrt2 * kTaperWidth));
}

bool kernel_resolved(const Grid1D& grid, double epsilon, double m, double hbar) {
  return grid.spacing() <= kernel_width(epsilon, m, hbar) / 4.0 * (1.0 + 1e-12);
}

Matrix kernel_exponent(double x, double x_prev, double t, const GaugeField1D& field,
                       const KernelConfig& cfg, double m, double hbar) {
  const double xi = x - x_prev;
  const double mid = 0.5 * (x + x_prev);
  const Complex scalar = Complex(-cfg.eta, 1.0) * m * xi * xi / (2.0 * cfg.epsilon * hbar);
  const int n = field.dim();
  return scalar * Matrix::Identity(n, n) -
         (xi * field.a(t, mid).matrix() + cfg.epsilon * field.phi(t, mid).matrix()) / hbar;
}

GroupAlgebraElement infinitesimal_kernel(double x, double x_prev, double t,
                                         const GaugeField1D& field, const KernelConfig& cfg,
                                         double m, double hbar) {
  if (!(m > 0.0) || !(hbar > 0.0)) throw InvalidArgument("infinitesimal_kernel: m and hbar must be positive");
  cfg.validate();
  const Complex norm = cfg.normalization.value_or(analytic_normalization(cfg.epsilon, m, hbar));
  return GroupAlgebraElement(norm * matrix_exp(kernel_exponent(x, x_prev, t, field, cfg, m, hbar)));
}

GroupAlgebraElement interaction_factor(double x, double x_prev, double t, double epsilon,
                                       const GaugeField1D& field, double hbar) {
  const double xi = x - x_prev;
  const double mid = 0.5 * (x + x_prev);
  return GroupAlgebraElement(
      matrix_exp(-(xi * field.a(t, mid).matrix() + epsilon * field.phi(t, mid).matrix()) / hbar));
}

GroupAlgebraElement path_interaction_product(const LatticePath& path, const GaugeField1D& field,
                                             double hbar) {
  const auto& pts = path.points();
  Matrix w = Matrix::Identity(field.dim(), field.dim());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    // The kernel samples the field at the midpoint in x and at the start of
    // the time slice.
    const double eps = pts[k].t - pts[k - 1].t;
    w = interaction_factor(pts[k].x, pts[k - 1].x, pts[k - 1].t, eps, field, hbar).matrix() * w;
  }
  return GroupAlgebraElement(std::move(w));
}

SparseMatrix step_matrix(const Grid1D& grid, const GaugeField1D& field, const KernelConfig& cfg,
                         double t, double m, double hbar) {
  cfg.validate();
  if (!(m > 0.0) || !(hbar > 0.0)) throw InvalidArgument("step_matrix: m and hbar must be positive");
  check_resolution(grid, cfg, m, hbar);
  const int n = grid.n_sites();
  const int dim = field.dim();
  const double dx = grid.spacing();
  const double sigma = kernel_width(cfg.epsilon, m, hbar);
  const int reach = static_cast<int>(std::floor(cfg.window * sigma / dx));
  const bool periodic = grid.boundary() == Boundary::periodic;
  if (periodic && 2 * reach + 1 > n) {
    throw InvalidArgument("step_matrix: quadrature window wider than the periodic domain");
  }
  const Complex norm = cfg.normalization.value_or(analytic_normalization(cfg.epsilon, m, hbar));

  // Midpoints (x_i + x_j) / 2 all sit on the half-lattice; sample the field
  // there once. Half-site h corresponds to x_min + h dx / 2.
  const int halves = 2 * n;
  std::vector<Matrix> a_half(halves), phi_half(halves);
  for (int h = 0; h < halves; ++h) {
    const double x = grid.x_min() + 0.5 * h * dx;
    a_half[h] = field.a(t, x).matrix();
    phi_half[h] = field.phi(t, x).matrix();
  }

  auto build_rows = [&](int row_begin, int row_end, std::vector<Triplet>& out) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int d = -reach; d <= reach; ++d) {
        int j = i - d;
        if (periodic) {
          j = ((j % n) + n) % n;
        } else if (j < 0 || j >= n) {
          continue;
        }
        const double xi = d * dx;
        const double w = window_weight(xi / sigma, cfg.window);
        if (w == 0.0) continue;
        int h = 2 * i - d;  // half-site index of the midpoint
        if (periodic) h = ((h % halves) + halves) % halves;
        const Complex scalar =
            Complex(-cfg.eta, 1.0) * m * xi * xi / (2.0 * cfg.epsilon * hbar);
        const Matrix algebra = -(xi * a_half[h] + cfg.epsilon * phi_half[h]) / hbar;
        // The scalar part commutes with the algebra part, so its exponential
        // factors out exactly.
        const Matrix k = (norm * std::exp(scalar) * w * dx) * matrix_exp(algebra);
        for (int r = 0; r < dim; ++r) {
          for (int c = 0; c < dim; ++c) out.emplace_back(i * dim + r, j * dim + c, k(r, c));
        }
      }
    }
  };

  const int workers = std::clamp(cfg.threads, 1, n);
  std::vector<std::vector<Triplet>> parts(workers);
  if (workers == 1) {
    build_rows(0, n, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
      const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
      pool.emplace_back(build_rows, begin, end, std::ref(parts[w]));
    }
    for (auto& th : pool) th.join();
  }
  std::vector<Triplet> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  SparseMatrix s(n * dim, n * dim);
  s.setFromTriplets(all.begin(), all.end());
  s.makeCompressed();
  return s;
}

Wavefunction huygens_step(const Wavefunction& psi, const GaugeField1D& field,
                          const KernelConfig& cfg, double m, double hbar) {
  if (psi.dim() != field.dim()) throw ShapeError("huygens_step: field and wave function dimensions differ");
  const SparseMatrix s = step_matrix(psi.grid(), field, cfg, psi.time(), m, hbar);
  return Wavefunction(psi.grid(), Matrix(s * psi.values()), psi.time() + cfg.epsilon);
}

// --- PropagatorMatrix -------------------------------------------------------

PropagatorMatrix::PropagatorMatrix(Grid1D grid, int dim, double t_begin, double t_end, Matrix entries)
    : grid_(grid), dim_(dim), t_begin_(t_begin), t_end_(t_end), entries_(std::move(entries)) {
  const Eigen::Index size = static_cast<Eigen::Index>(grid_.n_sites()) * dim_;
  if (entries_.rows() != size || entries_.cols() != size) throw ShapeError("PropagatorMatrix: wrong size");
  if (!entries_.allFinite()) throw NumericError("PropagatorMatrix: non-finite entries");
}

GroupAlgebraElement PropagatorMatrix::block(int i, int j) const {
  return GroupAlgebraElement(entries_.block(static_cast<Eigen::Index>(i) * dim_,
                                            static_cast<Eigen::Index>(j) * dim_, dim_, dim_));
}

Wavefunction PropagatorMatrix::apply(const Wavefunction& psi) const {
  if (!(psi.grid() == grid_) || psi.dim() != dim_) throw ShapeError("PropagatorMatrix::apply: lattice mismatch");
  return Wavefunction(grid_, Matrix(entries_ * psi.values()), t_end_);
}

PropagatorMatrix PropagatorMatrix::operator*(const PropagatorMatrix& earlier) const {
  if (!(earlier.grid_ == grid_) || earlier.dim_ != dim_) throw ShapeError("PropagatorMatrix: lattice mismatch");
  return PropagatorMatrix(grid_, dim_, earlier.t_begin_, t_end_, entries_ * earlier.entries_);
}

PropagatorMatrix finite_propagator(const Grid1D& grid, const GaugeField1D& field,
                                   const KernelConfig& cfg, double t1, double t2, double m,
                                   double hbar) {
  const int steps = integer_steps(t2 - t1, cfg.epsilon, "finite_propagator");
  const int size = grid.n_sites() * field.dim();
  Matrix p = Matrix::Identity(size, size);
  SparseMatrix s;
  for (int k = 0; k < steps; ++k) {
    if (k == 0 || !field.time_independent()) s = step_matrix(grid, field, cfg, t1 + k * cfg.epsilon, m, hbar);
    p = s * p;
  }
  return PropagatorMatrix(grid, field.dim(), t1, t2, std::move(p));
}

Trajectory evolve_path(const Wavefunction& psi0, const GaugeField1D& field, const KernelConfig& cfg,
                       double m, double hbar, double t_final, const std::vector<Observer>& observers,
                       const EvolveOptions& options) {
  if (psi0.dim() != field.dim()) throw ShapeError("evolve_path: field and wave function dimensions differ");
  if (t_final < psi0.time()) throw InvalidArgument("evolve_path: t_final precedes the initial time");
  Trajectory traj{psi0, {}};
  auto emit = [&](const Wavefunction& psi, int k) {
    traj.snapshots.push_back(make_snapshot(psi, k, options.record_values));
    for (const auto& obs : observers) obs(traj.snapshots.back());
  };
  emit(psi0, 0);
  if (t_final == psi0.time()) return traj;
  const int steps = integer_steps(t_final - psi0.time(), cfg.epsilon, "evolve_path");
  Wavefunction psi = psi0;
  SparseMatrix s;
  for (int k = 1; k <= steps; ++k) {
    if (k == 1 || !field.time_independent()) s = step_matrix(psi.grid(), field, cfg, psi.time(), m, hbar);
    psi = Wavefunction(psi.grid(), Matrix(s * psi.values()), psi0.time() + k * cfg.epsilon);
    if (k == steps) psi.set_time(t_final);
    if (k == steps || (options.snapshot_every > 0 && k % options.snapshot_every == 0)) emit(psi, k);
  }
  traj.final_state = std::move(psi);
  return traj;
}

// --- cross-validation -------------------------------------------------------

double ConvergenceReport::min_order() const {
  if (observed_orders.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(observed_orders.begin(), observed_orders.end());
}

bool ConvergenceReport::monotone() const {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (!(levels[k].distance < levels[k - 1].distance)) return false;
  }
  return true;
}

ConvergenceReport compare_with_pde(const InitialState& psi0, const GaugeField1D& field, double m,
                                   double hbar, double t_final,
                                   const std::vector<Resolution>& resolutions,
                                   const KernelConfig& base) {
  ConvergenceReport report;
  for (const auto& res : resolutions) {
    const Wavefunction start = psi0(res.grid);
    double distance = 0.0;
    if (t_final > start.time()) {
      KernelConfig kcfg = base;
      kcfg.epsilon = res.epsilon;
      const Wavefunction by_path = evolve_path(start, field, kcfg, m, hbar, t_final).final_state;
      EvolutionConfig ecfg;
      ecfg.mass = m;
      ecfg.hbar = hbar;
      ecfg.dt = res.epsilon;
      const Wavefunction by_pde = evolve(start, field, ecfg, t_final).final_state;
      distance = l2_distance(by_path, by_pde);
    }
    report.levels.push_back({res.epsilon, res.grid.n_sites(), distance});
  }
  for (std::size_t k = 1; k < report.levels.size(); ++k) {
    const auto& a = report.levels[k - 1];
    const auto& b = report.levels[k];
    report.observed_orders.push_back(std::log(a.distance / b.distance) / std::log(a.epsilon / b.epsilon));
  }
  return report;
}

}  // namespace gqm
