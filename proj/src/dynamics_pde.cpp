#include "gqm/dynamics_pde.hpp"

#include "gqm/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gqm {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Neighbor site index, or -1 outside a reflecting domain.
int neighbor(const Grid1D& grid, int j, int offset) {
  const int n = grid.n_sites();
  const int k = j + offset;
  if (grid.boundary() == Boundary::periodic) return ((k % n) + n) % n;
  return (k < 0 || k >= n) ? -1 : k;
}

void add_block(std::vector<Triplet>& out, int n_dim, int row_site, int col_site, const Matrix& m) {
  for (int r = 0; r < n_dim; ++r) {
    for (int c = 0; c < n_dim; ++c) {
      if (m(r, c) != Complex{}) out.emplace_back(row_site * n_dim + r, col_site * n_dim + c, m(r, c));
    }
  }
}

void add_scalar_block(std::vector<Triplet>& out, int n_dim, int row_site, int col_site, Complex s) {
  for (int r = 0; r < n_dim; ++r) out.emplace_back(row_site * n_dim + r, col_site * n_dim + r, s);
}

SparseMatrix from_triplets(int size, const std::vector<Triplet>& t) {
  SparseMatrix m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseMatrix block_diagonal(const Grid1D& grid, int dim, const std::function<Matrix(double)>& at) {
  std::vector<Triplet> t;
  for (int j = 0; j < grid.n_sites(); ++j) add_block(t, dim, j, j, at(grid.x(j)));
  return from_triplets(grid.n_sites() * dim, t);
}

void require_dims(const Wavefunction& psi, const GaugeField1D& field, const char* what) {
  if (psi.dim() != field.dim()) throw ShapeError(std::string(what) + ": field and wave function dimensions differ");
}

}  // namespace

void EvolutionConfig::validate() const {
  std::ostringstream errors;
  if (!(mass > 0.0)) errors << " mass must be positive;";
  if (!(hbar > 0.0)) errors << " hbar must be positive;";
  if (!(dt > 0.0)) errors << " dt must be positive;";
  if (!(solve_tolerance > 0.0 && solve_tolerance <= 1e-6)) errors << " solve tolerance must lie in (0, 1e-6];";
  if (!errors.str().empty()) throw ValidationError("EvolutionConfig:" + errors.str());
}

SparseMatrix covariant_derivative_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                                         double hbar) {
  const int n = grid.n_sites();
  const int dim = field.dim();
  const double c = hbar / (2.0 * grid.spacing());
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n) * dim * (dim + 2));
  for (int j = 0; j < n; ++j) {
    if (const int up = neighbor(grid, j, +1); up >= 0) add_scalar_block(trip, dim, j, up, c);
    if (const int dn = neighbor(grid, j, -1); dn >= 0) add_scalar_block(trip, dim, j, dn, -c);
    add_block(trip, dim, j, j, field.a(t, grid.x(j)).matrix());
  }
  return from_triplets(n * dim, trip);
}

SparseMatrix generator_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                              const EvolutionConfig& cfg) {
  const SparseMatrix d = covariant_derivative_matrix(grid, field, t, cfg.hbar);
  const SparseMatrix phi =
      block_diagonal(grid, field.dim(), [&](double x) { return field.phi(t, x).matrix(); });
  const Complex kinetic = kI / (2.0 * cfg.mass * cfg.hbar);
  SparseMatrix g = kinetic * SparseMatrix(d * d) - phi / cfg.hbar;
  g.makeCompressed();
  return g;
}

SparseMatrix hamiltonian_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                                const EvolutionConfig& cfg) {
  const int n = grid.n_sites();
  const int dim = field.dim();
  const double c = cfg.hbar / (2.0 * grid.spacing());
  const double k = -1.0 / (2.0 * cfg.mass);
  std::vector<Matrix> a(n);
  for (int j = 0; j < n; ++j) a[j] = field.a(t, grid.x(j)).matrix();
  std::vector<Triplet> trip;
  for (int j = 0; j < n; ++j) {
    const int up = neighbor(grid, j, +1);
    const int dn = neighbor(grid, j, -1);
    // (D^2)_{j,j+-2} = c^2 through the intermediate neighbor.
    if (up >= 0) {
      if (const int up2 = neighbor(grid, up, +1); up2 >= 0) add_scalar_block(trip, dim, j, up2, k * c * c);
      add_block(trip, dim, j, up, k * c * (a[j] + a[up]));
    }
    if (dn >= 0) {
      if (const int dn2 = neighbor(grid, dn, -1); dn2 >= 0) add_scalar_block(trip, dim, j, dn2, k * c * c);
      add_block(trip, dim, j, dn, -k * c * (a[j] + a[dn]));
    }
    const int neighbors = (up >= 0) + (dn >= 0);
    Matrix diag = k * (a[j] * a[j] - neighbors * c * c * Matrix::Identity(dim, dim));
    diag -= kI * field.phi(t, grid.x(j)).matrix();
    add_block(trip, dim, j, j, diag);
  }
  return from_triplets(n * dim, trip);
}

Wavefunction apply_generator(const Wavefunction& psi, const GaugeField1D& field,
                             const EvolutionConfig& cfg) {
  require_dims(psi, field, "apply_generator");
  const SparseMatrix g = generator_matrix(psi.grid(), field, psi.time(), cfg);
  return Wavefunction(psi.grid(), Matrix(g * psi.values()), psi.time());
}

double hamiltonian_consistency_check(const GaugeField1D& field, const EvolutionConfig& cfg,
                                     const Grid1D& grid) {
  if (!field.time_independent()) {
    throw UnsupportedError("hamiltonian_consistency_check: field must be time independent");
  }
  const SparseMatrix g = generator_matrix(grid, field, 0.0, cfg);
  const SparseMatrix h = hamiltonian_matrix(grid, field, 0.0, cfg);
  const SparseMatrix defect = g + (kI / cfg.hbar) * h;
  double worst = 0.0;
  for (int col = 0; col < defect.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(defect, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

// --- stepping ---------------------------------------------------------------

PdeStepper::PdeStepper(Grid1D grid, GaugeField1D field, EvolutionConfig cfg)
    : grid_(grid), field_(std::move(field)), cfg_(cfg) {
  cfg_.validate();
  if (cfg_.scheme == Scheme::split_step) {
    if (grid_.boundary() != Boundary::periodic) {
      throw UnsupportedError("split-step scheme requires periodic boundaries");
    }
    if (!field_.traits().no_vector_potential) {
      throw UnsupportedError("split-step scheme supports only fields with a = 0");
    }
  }
}

Wavefunction PdeStepper::step(const Wavefunction& psi, std::optional<double> dt) {
  if (!(psi.grid() == grid_)) throw ShapeError("PdeStepper::step: grid mismatch");
  if (psi.dim() != field_.dim()) throw ShapeError("PdeStepper::step: dimension mismatch");
  const double h = dt.value_or(cfg_.dt);
  if (!(h > 0.0)) throw InvalidArgument("PdeStepper::step: dt must be positive");
  return cfg_.scheme == Scheme::crank_nicolson ? crank_nicolson(psi, h) : split_step(psi, h);
}

void PdeStepper::factorize(double t_mid, double dt) {
  const SparseMatrix g = generator_matrix(grid_, field_, t_mid, cfg_);
  SparseMatrix id(g.rows(), g.cols());
  id.setIdentity();
  lhs_ = id - (0.5 * dt) * g;
  rhs_ = id + (0.5 * dt) * g;
  lhs_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
  lu_->analyzePattern(lhs_);
  lu_->factorize(lhs_);
  if (lu_->info() != Eigen::Success) {
    const std::string detail = lu_->lastErrorMessage();
    lu_.reset();
    throw SolverError("Crank-Nicolson factorization failed: " + detail,
                      std::numeric_limits<double>::infinity());
  }
  factored_dt_ = dt;
}

Wavefunction PdeStepper::crank_nicolson(const Wavefunction& psi, double dt) {
  const bool reuse = field_.time_independent() && lu_ && factored_dt_ == dt;
  if (!reuse) factorize(psi.time() + 0.5 * dt, dt);
  const Matrix b = rhs_ * psi.values();
  Matrix x = lu_->solve(b);
  const double bnorm = b.norm();
  const double residual = bnorm > 0.0 ? (lhs_ * x - b).norm() / bnorm : (lhs_ * x).norm();
  if (!(residual <= cfg_.solve_tolerance)) {
    throw SolverError("Crank-Nicolson solve did not reach tolerance", residual);
  }
  return Wavefunction(grid_, std::move(x), psi.time() + dt);
}

Wavefunction PdeStepper::split_step(const Wavefunction& psi, double dt) {
  // Strang splitting: half potential, exact free kinetic in Fourier space,
  // half potential. The kinetic factor uses the continuum symbol.
  const int n = grid_.n_sites();
  const int dim = psi.dim();
  const double t_mid = psi.time() + 0.5 * dt;
  std::vector<Matrix> half(n);
  for (int j = 0; j < n; ++j) {
    half[j] = matrix_exp(-(0.5 * dt / cfg_.hbar) * field_.phi(t_mid, grid_.x(j)).matrix());
  }
  Wavefunction out = psi;
  for (int j = 0; j < n; ++j) out.block(j) = half[j] * out.block(j);

  Eigen::FFT<double> fft;
  std::vector<Complex> line(n), spectrum(n);
  const double l = grid_.length();
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      for (int j = 0; j < n; ++j) line[j] = out.values()(j * dim + r, c);
      fft.fwd(spectrum, line);
      for (int m = 0; m < n; ++m) {
        const int mm = m <= n / 2 ? m : m - n;
        const double k = 2.0 * std::numbers::pi * mm / l;
        spectrum[m] *= std::exp(Complex(0.0, -cfg_.hbar * k * k * dt / (2.0 * cfg_.mass)));
      }
      fft.inv(line, spectrum);
      for (int j = 0; j < n; ++j) out.values()(j * dim + r, c) = line[j];
    }
  }
  for (int j = 0; j < n; ++j) out.block(j) = half[j] * out.block(j);
  out.set_time(psi.time() + dt);
  return out;
}

Wavefunction step(const Wavefunction& psi, const GaugeField1D& field, const EvolutionConfig& cfg) {
  require_dims(psi, field, "step");
  PdeStepper stepper(psi.grid(), field, cfg);
  return stepper.step(psi);
}

int step_count(double span, double dt) {
  if (span <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

Snapshot make_snapshot(const Wavefunction& psi, int step, bool record_values) {
  Snapshot s;
  s.step = step;
  s.time = psi.time();
  s.total_probability = total_probability(psi);
  s.density = density(psi);
  if (record_values) s.values = psi.values();
  return s;
}

Trajectory evolve(const Wavefunction& psi0, const GaugeField1D& field, const EvolutionConfig& cfg,
                  double t_final, const std::vector<Observer>& observers,
                  const EvolveOptions& options) {
  require_dims(psi0, field, "evolve");
  cfg.validate();
  if (t_final < psi0.time()) throw InvalidArgument("evolve: t_final precedes the initial time");
  Trajectory traj{psi0, {}};
  auto emit = [&](const Wavefunction& psi, int k) {
    traj.snapshots.push_back(make_snapshot(psi, k, options.record_values));
    for (const auto& obs : observers) obs(traj.snapshots.back());
  };
  emit(psi0, 0);
  const double span = t_final - psi0.time();
  const int steps = step_count(span, cfg.dt);
  if (steps == 0) return traj;
  const double dt = span / steps;
  PdeStepper stepper(psi0.grid(), field, cfg);
  Wavefunction psi = psi0;
  for (int k = 1; k <= steps; ++k) {
    psi = stepper.step(psi, dt);
    if (k == steps) psi.set_time(t_final);
    if (k == steps || (options.snapshot_every > 0 && k % options.snapshot_every == 0)) emit(psi, k);
  }
  traj.final_state = std::move(psi);
  return traj;
}

}  // namespace gqm
