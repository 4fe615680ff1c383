#include "gqm/lie_core.hpp"

#include "gqm/errors.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace gqm {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade coefficients b_0..b_m for the degrees used by scaling and squaring.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// theta_m: largest 1-norm for which the degree-m approximant is accurate to
// unit roundoff without scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t M>
Matrix pade_low(const Matrix& a, const std::array<double, M>& b) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix even = b[0] * id;
  Matrix odd = b[1] * id;
  Matrix power = id;
  for (std::size_t k = 2; k + 1 < M; k += 2) {
    power = power * a2;
    even += b[k] * power;
    odd += b[k + 1] * power;
  }
  const Matrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * id);
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

// --- AlgebraElement ---------------------------------------------------------

AlgebraElement::AlgebraElement(Matrix entries) {
  require_square(entries, "AlgebraElement");
  if (!all_finite(entries)) throw NumericError("AlgebraElement: non-finite entries");
  const Matrix herm_part = (entries + entries.adjoint()) * 0.5;
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double defect = herm_part.cwiseAbs().maxCoeff();
  if (defect > kAntiHermitianProjectTol * scale) {
    std::ostringstream os;
    os << "AlgebraElement: matrix is not anti-Hermitian (defect " << defect << ")";
    throw InvalidArgument(os.str());
  }
  m_ = (entries - entries.adjoint()) * 0.5;
}

AlgebraElement AlgebraElement::zero(int dim) {
  if (dim < 1) throw InvalidDimension("AlgebraElement::zero: dim must be positive");
  return AlgebraElement(Matrix::Zero(dim, dim), Trusted{});
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("AlgebraElement: dimension mismatch");
  return AlgebraElement(m_ + o.m_, Trusted{});
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("AlgebraElement: dimension mismatch");
  return AlgebraElement(m_ - o.m_, Trusted{});
}

AlgebraElement AlgebraElement::operator-() const { return AlgebraElement(-m_, Trusted{}); }

AlgebraElement AlgebraElement::operator*(double s) const {
  return AlgebraElement(m_ * s, Trusted{});
}

AlgebraElement AlgebraElement::commutator(const AlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("AlgebraElement: dimension mismatch");
  return AlgebraElement(m_ * o.m_ - o.m_ * m_);
}

// --- GroupAlgebraElement ----------------------------------------------------

GroupAlgebraElement::GroupAlgebraElement(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "GroupAlgebraElement");
  if (!all_finite(m_)) throw NumericError("GroupAlgebraElement: non-finite entries");
}

GroupAlgebraElement GroupAlgebraElement::identity(int dim) {
  if (dim < 1) throw InvalidDimension("GroupAlgebraElement::identity: dim must be positive");
  return GroupAlgebraElement(Matrix::Identity(dim, dim));
}

GroupAlgebraElement GroupAlgebraElement::zero(int dim) {
  if (dim < 1) throw InvalidDimension("GroupAlgebraElement::zero: dim must be positive");
  return GroupAlgebraElement(Matrix::Zero(dim, dim));
}

GroupAlgebraElement GroupAlgebraElement::adjoint() const {
  return GroupAlgebraElement(m_.adjoint());
}

GroupAlgebraElement GroupAlgebraElement::operator+(const GroupAlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("GroupAlgebraElement: dimension mismatch");
  return GroupAlgebraElement(m_ + o.m_);
}

GroupAlgebraElement GroupAlgebraElement::operator-(const GroupAlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("GroupAlgebraElement: dimension mismatch");
  return GroupAlgebraElement(m_ - o.m_);
}

GroupAlgebraElement GroupAlgebraElement::operator*(const GroupAlgebraElement& o) const {
  if (dim() != o.dim()) throw ShapeError("GroupAlgebraElement: dimension mismatch");
  return GroupAlgebraElement(m_ * o.m_);
}

GroupAlgebraElement GroupAlgebraElement::operator*(Complex s) const {
  return GroupAlgebraElement(m_ * s);
}

// --- GroupElement -----------------------------------------------------------

GroupElement::GroupElement(Matrix entries, double tol) : m_(std::move(entries)) {
  require_square(m_, "GroupElement");
  if (!all_finite(m_)) throw NumericError("GroupElement: non-finite entries");
  const Eigen::Index n = m_.rows();
  const double defect = (m_.adjoint() * m_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > tol) {
    std::ostringstream os;
    os << "GroupElement: matrix is not unitary (defect " << defect << ")";
    throw InvalidTransform(os.str());
  }
}

GroupElement GroupElement::identity(int dim) {
  if (dim < 1) throw InvalidDimension("GroupElement::identity: dim must be positive");
  return GroupElement(Matrix::Identity(dim, dim));
}

GroupElement GroupElement::inverse() const { return GroupElement(m_.adjoint()); }

GroupElement GroupElement::operator*(const GroupElement& o) const {
  if (dim() != o.dim()) throw ShapeError("GroupElement: dimension mismatch");
  return GroupElement(m_ * o.m_, 1e-10);
}

// --- bases ------------------------------------------------------------------

double AlgebraBasis::structure_constant(int a, int b, int c) const {
  if (!structure_constants) throw UnsupportedError("AlgebraBasis: no structure constants");
  const int d = size();
  return (*structure_constants)[(static_cast<std::size_t>(a) * d + b) * d + c];
}

std::vector<double> AlgebraBasis::coordinates(const AlgebraElement& x, double* residual) const {
  const int d = size();
  const int n = dim();
  if (x.dim() != n) throw ShapeError("AlgebraBasis::coordinates: dimension mismatch");
  // Real least squares over the 2 N^2 real components of the matrix.
  Eigen::MatrixXd design(2 * n * n, d);
  Eigen::VectorXd rhs(2 * n * n);
  for (int a = 0; a < d; ++a) {
    const Matrix& t = generators[a].matrix();
    for (int k = 0; k < n * n; ++k) {
      design(2 * k, a) = t(k / n, k % n).real();
      design(2 * k + 1, a) = t(k / n, k % n).imag();
    }
  }
  for (int k = 0; k < n * n; ++k) {
    rhs(2 * k) = x.matrix()(k / n, k % n).real();
    rhs(2 * k + 1) = x.matrix()(k / n, k % n).imag();
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  if (residual) *residual = (design * c - rhs).norm();
  return {c.data(), c.data() + d};
}

AlgebraElement AlgebraBasis::combine(const std::vector<double>& coords) const {
  if (static_cast<int>(coords.size()) != size()) {
    throw ShapeError("AlgebraBasis::combine: coordinate count mismatch");
  }
  AlgebraElement out = AlgebraElement::zero(dim());
  for (int a = 0; a < size(); ++a) out = out + generators[a] * coords[a];
  return out;
}

namespace {

void fill_structure_constants(AlgebraBasis& basis) {
  const int d = basis.size();
  std::vector<double> f(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const Matrix comm = basis.generators[a].matrix() * basis.generators[b].matrix() -
                          basis.generators[b].matrix() * basis.generators[a].matrix();
      for (int c = 0; c < d; ++c) {
        const Complex proj = (basis.generators[c].matrix().adjoint() * comm).trace();
        f[(static_cast<std::size_t>(a) * d + b) * d + c] = proj.real() / basis.trace_norm;
      }
    }
  }
  basis.structure_constants = std::move(f);
}

}  // namespace

AlgebraBasis su_basis(int n) {
  if (n < 2) throw InvalidDimension("su_basis: n must be at least 2");
  AlgebraBasis basis;
  basis.group = "SU(" + std::to_string(n) + ")";
  basis.trace_norm = 0.5;
  auto push_hermitian = [&](const Matrix& lambda) {
    basis.generators.emplace_back(Matrix(-0.5 * kI * lambda));
  };
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Matrix sym = Matrix::Zero(n, n);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      push_hermitian(sym);
      Matrix anti = Matrix::Zero(n, n);
      anti(j, k) = -kI;
      anti(k, j) = kI;
      push_hermitian(anti);
    }
  }
  for (int l = 1; l < n; ++l) {
    Matrix diag = Matrix::Zero(n, n);
    const double c = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) diag(j, j) = c;
    diag(l, l) = -c * l;
    push_hermitian(diag);
  }
  fill_structure_constants(basis);
  return basis;
}

AlgebraBasis u_basis(int n) {
  if (n < 1) throw InvalidDimension("u_basis: n must be positive");
  AlgebraBasis basis;
  if (n >= 2) basis = su_basis(n);
  basis.group = "U(" + std::to_string(n) + ")";
  basis.trace_norm = 0.5;
  basis.generators.emplace_back(
      Matrix(kI / std::sqrt(2.0 * n) * Matrix::Identity(n, n)));
  fill_structure_constants(basis);
  return basis;
}

UnitarySplit split_unitary(const AlgebraElement& x) {
  const int n = x.dim();
  const double l0 = x.matrix().trace().imag() / n;
  const Matrix su = x.matrix() - kI * l0 * Matrix::Identity(n, n);
  return {l0, AlgebraElement(su)};
}

AlgebraElement join_unitary(double scalar_part, const AlgebraElement& su_part) {
  const int n = su_part.dim();
  return AlgebraElement(Matrix(kI * scalar_part * Matrix::Identity(n, n) + su_part.matrix()));
}

// --- exponentials -----------------------------------------------------------

Matrix matrix_exp(const Matrix& a) {
  require_square(a, "matrix_exp");
  if (!all_finite(a)) throw NumericError("matrix_exp: non-finite entries");
  const double norm = one_norm(a);
  if (norm <= kTheta3) return pade_low(a, kPade3);
  if (norm <= kTheta5) return pade_low(a, kPade5);
  if (norm <= kTheta7) return pade_low(a, kPade7);
  if (norm <= kTheta9) return pade_low(a, kPade9);
  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  Matrix r = pade13(a * std::ldexp(1.0, -squarings));
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!all_finite(r)) throw NumericError("matrix_exp: overflow");
  return r;
}

GroupAlgebraElement exp_map(const AlgebraElement& x, Complex scale) {
  if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw NumericError("exp_map: non-finite scale");
  }
  return GroupAlgebraElement(matrix_exp(scale * x.matrix()));
}

double probability(const GroupAlgebraElement& g) { return g.matrix().squaredNorm(); }

Complex inner_product(const GroupAlgebraElement& g1, const GroupAlgebraElement& g2) {
  if (g1.dim() != g2.dim()) throw ShapeError("inner_product: dimension mismatch");
  return (g1.matrix().adjoint() * g2.matrix()).trace();
}

double inner_product_real(const GroupAlgebraElement& g1, const GroupAlgebraElement& g2) {
  if (g1.dim() != g2.dim()) throw ShapeError("inner_product_real: dimension mismatch");
  auto is_real = [](const Matrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; };
  if (!is_real(g1.matrix()) || !is_real(g2.matrix())) {
    throw ModeError("inner_product_real: complex entries in real-representation mode");
  }
  return (g1.matrix().real().transpose() * g2.matrix().real()).trace();
}

GroupAlgebraElement time_ordered_exp(const AlgebraPath& l, double t1, double t2, int steps,
                                     Sampling sampling) {
  if (steps <= 0) throw InvalidArgument("time_ordered_exp: steps must be positive");
  if (!(t2 > t1)) throw InvalidArgument("time_ordered_exp: requires t2 > t1");
  const double dt = (t2 - t1) / steps;
  const double offset = sampling == Sampling::midpoint ? 0.5 : 0.0;
  Matrix u;
  for (int k = 0; k < steps; ++k) {
    const AlgebraElement x = l(t1 + (k + offset) * dt);
    const Matrix factor = matrix_exp(dt * x.matrix());
    u = k == 0 ? factor : Matrix(factor * u);
  }
  return GroupAlgebraElement(std::move(u));
}

// --- random samples ---------------------------------------------------------

AlgebraElement random_algebra_element(const AlgebraBasis& basis, std::mt19937_64& rng,
                                      double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(basis.size());
  for (double& v : c) v = scale * normal(rng);
  return basis.combine(c);
}

GroupElement random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(dim, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Haar measure: fix the phases of R's diagonal.
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
  }
  return GroupElement(q, 1e-10);
}

GroupAlgebraElement random_group_algebra_element(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(dim, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(normal(rng), normal(rng));
  return GroupAlgebraElement(std::move(z));
}

}  // namespace gqm
