#pragma once

// Background gauge fields on 1+1 dimensions, gauge transformations and
// Wilson lines along discretized paths.
//
// Conventions: phi = A_0 and a = A_1 are anti-Hermitian. Under a gauge
// transformation U(t, x)
//     A~_mu = U A_mu U^-1 + hbar U d_mu U^-1,
// and the Wilson line W = P exp(-(1/hbar) int A_mu dx^mu) transforms as
// W~ = U(end) W U(start)^-1. hbar defaults to 1 everywhere in this header.

#include "gqm/lie_core.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace gqm {

struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;
};

using AlgebraField = std::function<AlgebraElement(double t, double x)>;
using MatrixField = std::function<Matrix(double t, double x)>;

class GaugeField1D {
 public:
  struct Traits {
    bool time_independent = false;
    // a(t, x) == 0 everywhere; lets spectral schemes skip the covariant
    // derivative.
    bool no_vector_potential = false;
  };

  GaugeField1D(int dim, AlgebraField phi, AlgebraField a, Traits traits);

  AlgebraElement phi(double t, double x) const;
  AlgebraElement a(double t, double x) const;
  int dim() const { return dim_; }
  const Traits& traits() const { return traits_; }
  bool time_independent() const { return traits_.time_independent; }

  static GaugeField1D zero(int dim);
  static GaugeField1D constant(const AlgebraElement& phi, const AlgebraElement& a);
  /// phi0 and a0 times exp(-(x - center)^2 / (2 width^2)).
  static GaugeField1D gaussian_bump(const AlgebraElement& phi0, const AlgebraElement& a0,
                                    double center, double width);
  /// Smooth periodic random field on [x_min, x_max): each basis coefficient of
  /// phi and a is a sum of `modes` seeded Fourier modes of the given amplitude.
  static GaugeField1D random_smooth(const AlgebraBasis& basis, double x_min, double x_max,
                                    int modes, double amplitude, std::mt19937_64& rng);

 private:
  int dim_;
  AlgebraField phi_;
  AlgebraField a_;
  Traits traits_;
};

class GaugeTransform {
 public:
  /// u must return unitary matrices. Missing derivatives fall back to central
  /// differences with step h = 1e-5 * length_scale.
  GaugeTransform(int dim, MatrixField u, std::optional<MatrixField> du_dt,
                 std::optional<MatrixField> du_dx, double length_scale = 1.0,
                 bool time_independent = false);

  int dim() const { return dim_; }
  bool time_independent() const { return time_independent_; }
  /// Throws InvalidTransform if u(t, x) is not unitary to 1e-12.
  GroupElement u(double t, double x) const;
  Matrix du_dt(double t, double x) const;
  Matrix du_dx(double t, double x) const;
  double fd_step() const { return fd_step_; }

  GaugeTransform inverse() const;
  /// Pointwise product (this * other) with product-rule derivatives.
  GaugeTransform operator*(const GaugeTransform& other) const;

  static GaugeTransform constant(const GroupElement& u);
  /// U(x) = exp(theta(x) T) for a single generator T, with analytic
  /// derivative theta'(x) T U(x).
  static GaugeTransform abelian_embedded(const AlgebraElement& generator,
                                         std::function<double(double)> theta,
                                         std::function<double(double)> dtheta);

 private:
  int dim_;
  MatrixField u_;
  std::optional<MatrixField> du_dt_;
  std::optional<MatrixField> du_dx_;
  double fd_step_;
  bool time_independent_;
};

class LatticePath {
 public:
  /// At least two points with strictly increasing t.
  explicit LatticePath(std::vector<SpaceTimePoint> points);

  static LatticePath straight(SpaceTimePoint from, SpaceTimePoint to, int segments);

  const std::vector<SpaceTimePoint>& points() const { return points_; }
  int segments() const { return static_cast<int>(points_.size()) - 1; }
  const SpaceTimePoint& front() const { return points_.front(); }
  const SpaceTimePoint& back() const { return points_.back(); }

  /// Each segment subdivided into `factor` equal pieces.
  LatticePath refined(int factor) const;
  /// Sub-paths [0, index] and [index, end]; index must be interior.
  std::pair<LatticePath, LatticePath> split(int index) const;

 private:
  std::vector<SpaceTimePoint> points_;
};

/// Ordered product of per-segment midpoint exponentials
/// exp(-(phi(mid) dt + a(mid) dx) / hbar), later segments on the left.
GroupAlgebraElement wilson_line(const LatticePath& path, const GaugeField1D& field,
                                double hbar = 1.0);

/// phi~ = U phi U^-1 + hbar U d_t U^-1, a~ = U a U^-1 + hbar U d_x U^-1.
GaugeField1D gauge_transform_field(const GaugeField1D& field, const GaugeTransform& g,
                                   double hbar = 1.0);

/// The field gauge-equivalent to zero: (hbar U d_t U^-1, hbar U d_x U^-1).
GaugeField1D pure_gauge(const GaugeTransform& g, double hbar = 1.0);

/// Frobenius norm of W[path; A~] - U(end) W[path; A] U(start)^-1.
double transform_covariance_check(const LatticePath& path, const GaugeField1D& field,
                                  const GaugeTransform& g, double hbar = 1.0);

/// d_t a - d_x phi + [phi, a] by central differences with step h; vanishes
/// for pure-gauge fields up to O(h^2).
Matrix field_strength(const GaugeField1D& field, double t, double x, double h);

}  // namespace gqm
