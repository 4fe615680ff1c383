#pragma once

// Uniform 1-D lattice and group-algebra-valued wave functions on it.

#include "gqm/lie_core.hpp"

#include <vector>

namespace gqm {

enum class Boundary { periodic, reflecting };

class Grid1D {
 public:
  /// Sites x_j = x_min + j dx, dx = (x_max - x_min) / n_sites, n_sites >= 8.
  Grid1D(double x_min, double x_max, int n_sites, Boundary boundary = Boundary::periodic);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int n_sites() const { return n_sites_; }
  Boundary boundary() const { return boundary_; }
  double spacing() const { return (x_max_ - x_min_) / n_sites_; }
  double length() const { return x_max_ - x_min_; }
  double x(int j) const { return x_min_ + j * spacing(); }
  /// Periodic images folded back into [x_min, x_max).
  double wrap(double x) const;

  bool operator==(const Grid1D& o) const = default;

 private:
  double x_min_;
  double x_max_;
  int n_sites_;
  Boundary boundary_;
};

/// Values are stored as one (n_sites * N) x N complex matrix: rows
/// [j N, (j + 1) N) hold psi(x_j). Left actions on the group-algebra factor
/// then act column by column, which is what the solvers exploit.
class Wavefunction {
 public:
  Wavefunction(Grid1D grid, int dim, double time = 0.0);
  Wavefunction(Grid1D grid, Matrix stacked_values, double time);

  const Grid1D& grid() const { return grid_; }
  int dim() const { return dim_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  GroupAlgebraElement at(int site) const;
  void set(int site, const GroupAlgebraElement& g);
  auto block(int site) { return values_.middleRows(static_cast<Eigen::Index>(site) * dim_, dim_); }
  auto block(int site) const {
    return values_.middleRows(static_cast<Eigen::Index>(site) * dim_, dim_);
  }

  /// psi(x) = (2 pi width^2)^(-1/4) exp(-(x - center)^2 / (4 width^2) + i k x) g,
  /// so that |psi|^2 has standard deviation `width`.
  static Wavefunction gaussian_packet(const Grid1D& grid, double center, double width,
                                      double momentum, const GroupAlgebraElement& factor);

  /// Every site multiplied on the left by u.
  Wavefunction left_multiplied(const Matrix& u) const;

 private:
  Grid1D grid_;
  int dim_;
  Matrix values_;
  double time_;
};

/// <psi1, psi2> = sum_x Tr(psi1^dagger psi2) dx.
Complex lattice_inner_product(const Wavefunction& a, const Wavefunction& b);

/// sum_x p(psi(x)) dx.
double total_probability(const Wavefunction& psi);

/// Per-site p(psi(x)).
std::vector<double> density(const Wavefunction& psi);

/// sqrt(sum_x p(a - b) dx).
double l2_distance(const Wavefunction& a, const Wavefunction& b);

struct Moments {
  double mean = 0.0;
  double width = 0.0;  // standard deviation of the normalized density
};
Moments position_moments(const Wavefunction& psi);

}  // namespace gqm
