#pragma once

// Wave-function propagation by repeated Huygens steps with the short-time
// kernel
//     K(x, x') = Nrm exp( (1/hbar) [ i m xi^2 / (2 eps) - xi A(mid) - eps phi(mid) ] ),
// xi = x - x', mid = ((x + x') / 2, t), Nrm = sqrt(m / (2 pi i hbar eps)).
// The i of the ordinary propagator is absorbed into the algebra-valued
// Lagrangian, so the exponent is anti-Hermitian.
//
// Lattice quadrature: psi(t + eps, x_i) = sum_j K(x_i, x_j) w(|xi| / sigma) psi(t, x_j) dx
// with sigma = sqrt(eps hbar / m). The window w is 1 near the origin and
// rolls off smoothly (erfc profile) before |xi| = window * sigma; an
// optional regulator eta damps the Fresnel factor as m -> m (1 + i eta)
// inside the Gaussian only (Nrm stays analytic).

#include "gqm/dynamics_pde.hpp"
#include "gqm/gauge.hpp"
#include "gqm/lattice.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace gqm {

enum class ResolutionPolicy { error, warn, ignore };

struct KernelConfig {
  double epsilon = 1e-2;
  // Quadrature half-width in units of sigma.
  double window = 8.0;
  double eta = 1e-3;
  // nullopt selects the analytic normalization.
  std::optional<Complex> normalization;
  ResolutionPolicy resolution = ResolutionPolicy::error;
  // Worker threads used to assemble kernel rows; results do not depend on it.
  int threads = 1;

  void validate() const;
};

/// sqrt(m / (2 pi i hbar eps)) on the exp(-i pi / 4) branch.
Complex analytic_normalization(double epsilon, double m, double hbar);

/// sigma = sqrt(eps hbar / m).
double kernel_width(double epsilon, double m, double hbar);

/// Smooth quadrature window evaluated at |xi| / sigma; 0 beyond `window`.
double window_weight(double scaled_distance, double window);

/// True when dx <= sigma / 4.
bool kernel_resolved(const Grid1D& grid, double epsilon, double m, double hbar);

/// The exponent matrix (before the normalization factor) of the kernel. It
/// is anti-Hermitian when eta = 0.
Matrix kernel_exponent(double x, double x_prev, double t, const GaugeField1D& field,
                       const KernelConfig& cfg, double m, double hbar);

/// K(x, x') as defined above (no quadrature window or weight).
GroupAlgebraElement infinitesimal_kernel(double x, double x_prev, double t,
                                         const GaugeField1D& field, const KernelConfig& cfg,
                                         double m, double hbar);

/// exp(-(xi A(mid) + eps phi(mid)) / hbar): the algebra-valued part of the
/// kernel, which commutes with the scalar free part.
GroupAlgebraElement interaction_factor(double x, double x_prev, double t, double epsilon,
                                       const GaugeField1D& field, double hbar);

/// Product of interaction factors along one polygonal path (later steps on
/// the left); the time step is taken from consecutive path points.
GroupAlgebraElement path_interaction_product(const LatticePath& path, const GaugeField1D& field,
                                             double hbar);

/// One-step transfer matrix (quadrature weights included) acting on stacked
/// wave-function columns.
SparseMatrix step_matrix(const Grid1D& grid, const GaugeField1D& field, const KernelConfig& cfg,
                         double t, double m, double hbar);

Wavefunction huygens_step(const Wavefunction& psi, const GaugeField1D& field,
                          const KernelConfig& cfg, double m, double hbar);

/// Composed transfer matrix for [t_begin, t_end]; block (i, j) maps psi(x_j)
/// to psi(x_i) and already contains the quadrature weights.
class PropagatorMatrix {
 public:
  PropagatorMatrix(Grid1D grid, int dim, double t_begin, double t_end, Matrix entries);

  const Grid1D& grid() const { return grid_; }
  int dim() const { return dim_; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  const Matrix& entries() const { return entries_; }
  GroupAlgebraElement block(int i, int j) const;

  Wavefunction apply(const Wavefunction& psi) const;
  /// this after `earlier`: (t1 -> t2) composed with (t2 -> t3) is later * earlier.
  PropagatorMatrix operator*(const PropagatorMatrix& earlier) const;

 private:
  Grid1D grid_;
  int dim_;
  double t_begin_;
  double t_end_;
  Matrix entries_;
};

/// Throws InvalidArgument unless (t2 - t1) / eps is a positive integer
/// (to 1e-9 relative).
PropagatorMatrix finite_propagator(const Grid1D& grid, const GaugeField1D& field,
                                   const KernelConfig& cfg, double t1, double t2, double m,
                                   double hbar);

/// Iterated Huygens steps from psi0.time() to t_final (integer step count
/// required, as for finite_propagator).
Trajectory evolve_path(const Wavefunction& psi0, const GaugeField1D& field, const KernelConfig& cfg,
                       double m, double hbar, double t_final,
                       const std::vector<Observer>& observers = {},
                       const EvolveOptions& options = {});

struct Resolution {
  double epsilon;
  Grid1D grid;
};

struct ConvergenceLevel {
  double epsilon;
  int n_sites;
  double distance;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  // log2(d_k / d_{k+1}) / log2(eps_k / eps_{k+1}) between consecutive levels.
  std::vector<double> observed_orders;
  double min_order() const;
  bool monotone() const;
};

using InitialState = std::function<Wavefunction(const Grid1D&)>;

/// For each resolution evolves the initial state to t_final by Huygens steps
/// (step eps) and by Crank-Nicolson (dt = eps) on the same grid and records
/// the L2 distance. `base` supplies window, eta and normalization.
ConvergenceReport compare_with_pde(const InitialState& psi0, const GaugeField1D& field, double m,
                                   double hbar, double t_final,
                                   const std::vector<Resolution>& resolutions,
                                   const KernelConfig& base = {});

}  // namespace gqm
