#pragma once

// Matrix representation of compact Lie algebras, their groups and the group
// algebra. Everything lives in one fixed faithful unitary representation of
// dimension N; the group algebra is the full N x N complex matrix space.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gqm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

// Projection threshold for anti-Hermiticity: defects below this are treated as
// roundoff and projected away, larger ones are rejected.
inline constexpr double kAntiHermitianProjectTol = 1e-8;

/// Anti-Hermitian N x N matrix: a Lie-algebra value.
class AlgebraElement {
 public:
  /// Projects x <- (x - x^dagger)/2 when the defect is below
  /// kAntiHermitianProjectTol (relative to max(1, |x|)); throws otherwise.
  explicit AlgebraElement(Matrix entries);

  static AlgebraElement zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator-() const;
  AlgebraElement operator*(double s) const;
  friend AlgebraElement operator*(double s, const AlgebraElement& x) { return x * s; }

  /// [x, y] = xy - yx, again anti-Hermitian.
  AlgebraElement commutator(const AlgebraElement& o) const;

 private:
  struct Trusted {};
  AlgebraElement(Matrix entries, Trusted) : m_(std::move(entries)) {}
  Matrix m_;
};

/// Arbitrary N x N complex matrix: a probability-amplitude value.
class GroupAlgebraElement {
 public:
  explicit GroupAlgebraElement(Matrix entries);

  static GroupAlgebraElement identity(int dim);
  static GroupAlgebraElement zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  GroupAlgebraElement adjoint() const;
  GroupAlgebraElement operator+(const GroupAlgebraElement& o) const;
  GroupAlgebraElement operator-(const GroupAlgebraElement& o) const;
  GroupAlgebraElement operator*(const GroupAlgebraElement& o) const;
  GroupAlgebraElement operator*(Complex s) const;
  friend GroupAlgebraElement operator*(Complex s, const GroupAlgebraElement& g) { return g * s; }

 private:
  Matrix m_;
};

/// Unitary N x N matrix: a group element in the fixed representation.
class GroupElement {
 public:
  /// Throws InvalidTransform if entries^dagger entries deviates from the
  /// identity by more than tol (max-norm).
  explicit GroupElement(Matrix entries, double tol = 1e-12);

  static GroupElement identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& o) const;
  GroupAlgebraElement as_algebra_element() const { return GroupAlgebraElement(m_); }

 private:
  Matrix m_;
};

struct AlgebraBasis {
  std::string group;
  std::vector<AlgebraElement> generators;
  // Tr(T_a^dagger T_b) = trace_norm * delta_ab
  double trace_norm = 0.0;
  // f[a][b][c] with [T_a, T_b] = sum_c f_abc T_c (filled for su(N)).
  std::optional<std::vector<double>> structure_constants;

  int dim() const { return generators.empty() ? 0 : generators.front().dim(); }
  int size() const { return static_cast<int>(generators.size()); }
  double structure_constant(int a, int b, int c) const;

  /// Least-squares coordinates of x in this basis and the residual norm of
  /// the projection (zero when x lies in the span).
  std::vector<double> coordinates(const AlgebraElement& x, double* residual = nullptr) const;
  AlgebraElement combine(const std::vector<double>& coords) const;
};

/// N^2 - 1 traceless anti-Hermitian generators T = -i lambda / 2 built from the
/// generalized Gell-Mann matrices; Tr(T_a^dagger T_b) = delta_ab / 2.
AlgebraBasis su_basis(int n);

/// su(N) generators followed by the central generator i I / sqrt(2N), same
/// trace normalization. For n = 1 this is the single generator i/sqrt(2).
AlgebraBasis u_basis(int n);

/// Splits a u(N) element as x = i l0 I + x_su with x_su traceless.
struct UnitarySplit {
  double scalar_part;  // l0
  AlgebraElement su_part;
};
UnitarySplit split_unitary(const AlgebraElement& x);
AlgebraElement join_unitary(double scalar_part, const AlgebraElement& su_part);

/// Matrix exponential by scaling and squaring with diagonal Pade
/// approximants of degree 3..13 (Higham 2005). Throws NumericError on
/// non-finite input.
Matrix matrix_exp(const Matrix& a);

/// exp(scale * x). Unitary whenever scale is real.
GroupAlgebraElement exp_map(const AlgebraElement& x, Complex scale);

/// p(g) = Tr(g^dagger g) = sum |g_ij|^2.
double probability(const GroupAlgebraElement& g);

/// (g1, g2) = Tr(g1^dagger g2).
Complex inner_product(const GroupAlgebraElement& g1, const GroupAlgebraElement& g2);

/// (g1, g2) = Tr(g1^T g2) for real (orthogonal) representations. Throws
/// ModeError when either argument has a nonzero imaginary part.
double inner_product_real(const GroupAlgebraElement& g1, const GroupAlgebraElement& g2);

enum class Sampling { midpoint, left_endpoint };

using AlgebraPath = std::function<AlgebraElement(double)>;

/// Ordered product prod_k exp(dt L(t_k)) over `steps` equal slices of
/// [t1, t2], later slices multiplied on the left.
GroupAlgebraElement time_ordered_exp(const AlgebraPath& l, double t1, double t2, int steps,
                                     Sampling sampling = Sampling::midpoint);

// Seeded random samples used by property checks.
AlgebraElement random_algebra_element(const AlgebraBasis& basis, std::mt19937_64& rng,
                                      double scale = 1.0);
GroupElement random_unitary(int dim, std::mt19937_64& rng);
GroupAlgebraElement random_group_algebra_element(int dim, std::mt19937_64& rng);

}  // namespace gqm
