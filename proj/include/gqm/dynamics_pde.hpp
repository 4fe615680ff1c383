#pragma once

// Evolution of a group-algebra-valued wave function under
//     hbar d_t psi = [ i/(2m) (hbar d_x + A)^2 - phi ] psi
// on a uniform 1-D lattice.
//
// Discretization: D = hbar C + A, with C the central difference and A applied
// at the site by left multiplication; the generator is
//     G = (i / (2 m hbar)) D^2 - phi / hbar.
// C is real antisymmetric and A, phi are anti-Hermitian, so G is exactly
// anti-Hermitian in the lattice inner product and Crank-Nicolson is unitary.

#include "gqm/gauge.hpp"
#include "gqm/lattice.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace gqm {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

enum class Scheme { crank_nicolson, split_step };

struct EvolutionConfig {
  double mass = 1.0;
  double hbar = 1.0;
  double dt = 1e-2;
  Scheme scheme = Scheme::crank_nicolson;
  // Relative residual accepted from the linear solve.
  double solve_tolerance = 1e-10;

  void validate() const;
};

/// Lattice matrix of D = hbar C + A(t) acting on one column of the stacked
/// wave function.
SparseMatrix covariant_derivative_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                                         double hbar);

/// G(t), assembled as the sparse product D * D.
SparseMatrix generator_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                              const EvolutionConfig& cfg);

/// H = -(1/2m) D^2 - i phi, assembled directly from its five-point block
/// stencil (independently of generator_matrix).
SparseMatrix hamiltonian_matrix(const Grid1D& grid, const GaugeField1D& field, double t,
                                const EvolutionConfig& cfg);

/// G psi evaluated at psi.time().
Wavefunction apply_generator(const Wavefunction& psi, const GaugeField1D& field,
                             const EvolutionConfig& cfg);

/// max |G + (i/hbar) H| for a time-independent field; throws
/// UnsupportedError otherwise.
double hamiltonian_consistency_check(const GaugeField1D& field, const EvolutionConfig& cfg,
                                     const Grid1D& grid);

/// Reusable time stepper. For time-independent fields the Crank-Nicolson
/// factorization is computed once per step size and reused.
class PdeStepper {
 public:
  PdeStepper(Grid1D grid, GaugeField1D field, EvolutionConfig cfg);

  /// Advances psi by dt (cfg.dt when omitted). Time-dependent fields are
  /// sampled at t + dt/2.
  Wavefunction step(const Wavefunction& psi, std::optional<double> dt = std::nullopt);

 private:
  Wavefunction crank_nicolson(const Wavefunction& psi, double dt);
  Wavefunction split_step(const Wavefunction& psi, double dt);
  void factorize(double t_mid, double dt);

  Grid1D grid_;
  GaugeField1D field_;
  EvolutionConfig cfg_;
  SparseMatrix lhs_;
  SparseMatrix rhs_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
  std::optional<double> factored_dt_;
};

Wavefunction step(const Wavefunction& psi, const GaugeField1D& field, const EvolutionConfig& cfg);

struct Snapshot {
  int step = 0;
  double time = 0.0;
  double total_probability = 0.0;
  std::vector<double> density;
  std::optional<Matrix> values;  // stacked values when requested
};

using Observer = std::function<void(const Snapshot&)>;

struct EvolveOptions {
  // Emit a snapshot every this many steps (the initial and final states are
  // always emitted). 0 means initial and final only.
  int snapshot_every = 0;
  bool record_values = false;
};

struct Trajectory {
  Wavefunction final_state;
  std::vector<Snapshot> snapshots;
};

/// Repeated steps from psi0.time() to t_final. The step is shrunk to
/// (t_final - t0) / ceil((t_final - t0) / dt) so the horizon is hit exactly.
Trajectory evolve(const Wavefunction& psi0, const GaugeField1D& field, const EvolutionConfig& cfg,
                  double t_final, const std::vector<Observer>& observers = {},
                  const EvolveOptions& options = {});

/// Number of uniform steps evolve() takes over `span`.
int step_count(double span, double dt);

Snapshot make_snapshot(const Wavefunction& psi, int step, bool record_values);

}  // namespace gqm
