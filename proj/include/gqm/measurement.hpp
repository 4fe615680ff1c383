#pragma once

// Measurement with group-algebra-valued expansion coefficients. Observables
// are Hermitian operators on the ordinary lattice Hilbert space and act
// trivially on the group-algebra factor; the weight of outcome f_n is
// p(a_n) / sum_m p(a_m).

#include "gqm/lattice.hpp"

#include <string>
#include <vector>

namespace gqm {

class Observable {
 public:
  /// matrix must be n_sites x n_sites and Hermitian to 1e-12. The eigen
  /// decomposition is computed here, once.
  Observable(std::string name, const Matrix& matrix, Grid1D grid);

  static Observable position(const Grid1D& grid);
  /// -i hbar times the central difference.
  static Observable momentum(const Grid1D& grid, double hbar = 1.0);
  static Observable random_hermitian(const Grid1D& grid, std::mt19937_64& rng);

  const std::string& name() const { return name_; }
  const Grid1D& grid() const { return grid_; }
  const Matrix& matrix() const { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Column n is psi_n, normalized as sum_x |psi_n(x)|^2 dx = 1.
  const Matrix& eigenfunctions() const { return eigenfunctions_; }

 private:
  std::string name_;
  Grid1D grid_;
  Matrix matrix_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenfunctions_;
};

struct Expansion {
  std::vector<double> eigenvalues;
  std::vector<GroupAlgebraElement> coefficients;
};

/// a_n = sum_x conj(psi_n(x)) psi(x) dx.
Expansion expand(const Wavefunction& psi, const Observable& obs);

/// sum_n psi_n(x) a_n.
Wavefunction reconstruct(const Expansion& expansion, const Observable& obs);

struct Outcome {
  double value;
  // Several entries when degenerate eigenvalues were merged.
  std::vector<GroupAlgebraElement> coefficients;
  double probability;
};

struct MeasurementDistribution {
  std::vector<Outcome> outcomes;
  double total() const;
};

/// Outcomes whose eigenvalues agree to 1e-9 (relative) are merged. Throws
/// UndefinedDistribution if every coefficient vanishes.
MeasurementDistribution outcome_probabilities(const Expansion& expansion);

/// Per-site p(psi(x)) dx normalized by the total.
MeasurementDistribution position_distribution(const Wavefunction& psi);

}  // namespace gqm
