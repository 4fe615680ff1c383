#include "gqm/lattice.hpp"

#include "gqm/errors.hpp"

#include <cmath>
#include <numbers>

namespace gqm {

Grid1D::Grid1D(double x_min, double x_max, int n_sites, Boundary boundary)
    : x_min_(x_min), x_max_(x_max), n_sites_(n_sites), boundary_(boundary) {
  if (n_sites < 8) throw InvalidArgument("Grid1D: n_sites must be at least 8");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw InvalidArgument("Grid1D: need finite x_min < x_max");
  }
}

double Grid1D::wrap(double x) const {
  const double l = length();
  double r = std::fmod(x - x_min_, l);
  if (r < 0) r += l;
  return x_min_ + r;
}

Wavefunction::Wavefunction(Grid1D grid, int dim, double time)
    : grid_(grid), dim_(dim), time_(time) {
  if (dim < 1) throw InvalidDimension("Wavefunction: dim must be positive");
  values_ = Matrix::Zero(static_cast<Eigen::Index>(grid_.n_sites()) * dim, dim);
}

Wavefunction::Wavefunction(Grid1D grid, Matrix stacked_values, double time)
    : grid_(grid), dim_(static_cast<int>(stacked_values.cols())), values_(std::move(stacked_values)), time_(time) {
  if (dim_ < 1 || values_.rows() != static_cast<Eigen::Index>(grid_.n_sites()) * dim_) {
    throw ShapeError("Wavefunction: values must be (n_sites * N) x N");
  }
  if (!values_.allFinite()) throw NumericError("Wavefunction: non-finite values");
}

GroupAlgebraElement Wavefunction::at(int site) const { return GroupAlgebraElement(block(site)); }

void Wavefunction::set(int site, const GroupAlgebraElement& g) {
  if (g.dim() != dim_) throw ShapeError("Wavefunction::set: dimension mismatch");
  block(site) = g.matrix();
}

Wavefunction Wavefunction::gaussian_packet(const Grid1D& grid, double center, double width,
                                           double momentum, const GroupAlgebraElement& factor) {
  if (!(width > 0.0)) throw InvalidArgument("gaussian_packet: width must be positive");
  Wavefunction psi(grid, factor.dim());
  const double norm = std::pow(2.0 * std::numbers::pi * width * width, -0.25);
  for (int j = 0; j < grid.n_sites(); ++j) {
    const double d = grid.x(j) - center;
    const Complex amp = norm * std::exp(Complex(-d * d / (4.0 * width * width), momentum * grid.x(j)));
    psi.block(j) = amp * factor.matrix();
  }
  return psi;
}

Wavefunction Wavefunction::left_multiplied(const Matrix& u) const {
  if (u.rows() != dim_ || u.cols() != dim_) throw ShapeError("left_multiplied: dimension mismatch");
  Wavefunction out = *this;
  for (int j = 0; j < grid_.n_sites(); ++j) out.block(j) = u * block(j);
  return out;
}

namespace {
void require_same_lattice(const Wavefunction& a, const Wavefunction& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.dim() != b.dim()) {
    throw ShapeError(std::string(what) + ": grid or dimension mismatch");
  }
}
}  // namespace

Complex lattice_inner_product(const Wavefunction& a, const Wavefunction& b) {
  require_same_lattice(a, b, "lattice_inner_product");
  // Tr(A^dagger B) summed over sites equals the Frobenius product of the stacks.
  return (a.values().adjoint() * b.values()).trace() * a.grid().spacing();
}

double total_probability(const Wavefunction& psi) {
  return psi.values().squaredNorm() * psi.grid().spacing();
}

std::vector<double> density(const Wavefunction& psi) {
  std::vector<double> rho(psi.grid().n_sites());
  for (int j = 0; j < psi.grid().n_sites(); ++j) rho[j] = psi.block(j).squaredNorm();
  return rho;
}

double l2_distance(const Wavefunction& a, const Wavefunction& b) {
  require_same_lattice(a, b, "l2_distance");
  return std::sqrt((a.values() - b.values()).squaredNorm() * a.grid().spacing());
}

Moments position_moments(const Wavefunction& psi) {
  const auto rho = density(psi);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < psi.grid().n_sites(); ++j) {
    const double x = psi.grid().x(j);
    m0 += rho[j];
    m1 += rho[j] * x;
    m2 += rho[j] * x * x;
  }
  if (!(m0 > 0.0)) throw UndefinedDistribution("position_moments: zero wave function");
  const double mean = m1 / m0;
  return {mean, std::sqrt(std::max(0.0, m2 / m0 - mean * mean))};
}

}  // namespace gqm
