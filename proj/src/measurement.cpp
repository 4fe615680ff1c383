#include "gqm/measurement.hpp"

#include "gqm/errors.hpp"

#include <cmath>
#include <numeric>

namespace gqm {

Observable::Observable(std::string name, const Matrix& matrix, Grid1D grid)
    : name_(std::move(name)), grid_(grid), matrix_(matrix) {
  const int n = grid_.n_sites();
  if (matrix_.rows() != n || matrix_.cols() != n) throw ShapeError("Observable: matrix must be n_sites x n_sites");
  const double defect = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-12 * std::max(1.0, matrix_.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("Observable: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (matrix_ + matrix_.adjoint()));
  if (solver.info() != Eigen::Success) throw NumericError("Observable: eigen decomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenfunctions_ = solver.eigenvectors() / std::sqrt(grid_.spacing());
}

Observable Observable::position(const Grid1D& grid) {
  Matrix m = Matrix::Zero(grid.n_sites(), grid.n_sites());
  for (int j = 0; j < grid.n_sites(); ++j) m(j, j) = grid.x(j);
  return Observable("position", m, grid);
}

Observable Observable::momentum(const Grid1D& grid, double hbar) {
  const int n = grid.n_sites();
  const double c = hbar / (2.0 * grid.spacing());
  Matrix m = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    int up = j + 1, dn = j - 1;
    if (grid.boundary() == Boundary::periodic) {
      up %= n;
      dn = (dn + n) % n;
    }
    if (up < n) m(j, up) += -kI * c;
    if (dn >= 0) m(j, dn) += kI * c;
  }
  return Observable("momentum", m, grid);
}

Observable Observable::random_hermitian(const Grid1D& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = grid.n_sites();
  Matrix z(n, n);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(normal(rng), normal(rng));
  return Observable("random", Matrix(0.5 * (z + z.adjoint())), grid);
}

Expansion expand(const Wavefunction& psi, const Observable& obs) {
  if (!(psi.grid() == obs.grid())) throw ShapeError("expand: observable built on a different grid");
  const int n = psi.grid().n_sites();
  const int dim = psi.dim();
  const double dx = psi.grid().spacing();
  const Matrix& v = obs.eigenfunctions();
  Expansion out;
  out.eigenvalues.assign(obs.eigenvalues().data(), obs.eigenvalues().data() + n);
  out.coefficients.reserve(n);
  for (int k = 0; k < n; ++k) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) a += std::conj(v(j, k)) * psi.block(j);
    out.coefficients.emplace_back(a * dx);
  }
  return out;
}

Wavefunction reconstruct(const Expansion& expansion, const Observable& obs) {
  const int n = obs.grid().n_sites();
  if (static_cast<int>(expansion.coefficients.size()) != n) throw ShapeError("reconstruct: coefficient count mismatch");
  const int dim = expansion.coefficients.front().dim();
  Wavefunction psi(obs.grid(), dim);
  const Matrix& v = obs.eigenfunctions();
  for (int j = 0; j < n; ++j) {
    Matrix s = Matrix::Zero(dim, dim);
    for (int k = 0; k < n; ++k) s += v(j, k) * expansion.coefficients[k].matrix();
    psi.block(j) = s;
  }
  return psi;
}

double MeasurementDistribution::total() const {
  return std::accumulate(outcomes.begin(), outcomes.end(), 0.0,
                         [](double s, const Outcome& o) { return s + o.probability; });
}

MeasurementDistribution outcome_probabilities(const Expansion& expansion) {
  const std::size_t n = expansion.coefficients.size();
  if (expansion.eigenvalues.size() != n) throw ShapeError("outcome_probabilities: size mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return expansion.eigenvalues[a] < expansion.eigenvalues[b]; });
  MeasurementDistribution dist;
  double total = 0.0;
  for (const std::size_t k : order) {
    const double f = expansion.eigenvalues[k];
    const double w = probability(expansion.coefficients[k]);
    total += w;
    if (!dist.outcomes.empty()) {
      Outcome& last = dist.outcomes.back();
      if (std::abs(f - last.value) <= 1e-9 * std::max({1.0, std::abs(f), std::abs(last.value)})) {
        last.coefficients.push_back(expansion.coefficients[k]);
        last.probability += w;
        continue;
      }
    }
    dist.outcomes.push_back({f, {expansion.coefficients[k]}, w});
  }
  if (!(total > 0.0)) throw UndefinedDistribution("outcome_probabilities: all coefficients vanish");
  for (auto& o : dist.outcomes) o.probability /= total;
  return dist;
}

MeasurementDistribution position_distribution(const Wavefunction& psi) {
  const double dx = psi.grid().spacing();
  MeasurementDistribution dist;
  double total = 0.0;
  for (int j = 0; j < psi.grid().n_sites(); ++j) {
    const double w = psi.block(j).squaredNorm() * dx;
    total += w;
    dist.outcomes.push_back({psi.grid().x(j), {psi.at(j)}, w});
  }
  if (!(total > 0.0)) throw UndefinedDistribution("position_distribution: zero wave function");
  for (auto& o : dist.outcomes) o.probability /= total;
  return dist;
}

}  // namespace gqm
