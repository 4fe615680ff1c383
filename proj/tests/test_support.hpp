#pragma once

// Independent oracles shared by the test suites. Nothing here calls into the
// library's exponential or propagation code.

#include "gqm/lie_core.hpp"

#include <cmath>
#include <functional>

namespace gqm::testing {

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// exp(a) by a 40-term Taylor series after scaling by 2^-s, then squaring.
inline Matrix taylor_exp(const Matrix& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (std::ldexp(norm, -s) > 0.25) ++s;
  const Matrix x = a * std::ldexp(1.0, -s);
  const Eigen::Index n = a.rows();
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

/// exp(x) for anti-Hermitian x via the Hermitian eigen decomposition of i x.
inline Matrix eigen_exp_anti_hermitian(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(kI * x));
  const Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) phases(k) = std::exp(Complex(0.0, -lam(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Classical RK4 for dU/dt = L(t) U, U(t1) = I.
inline Matrix rk4_ordered_exp(const std::function<Matrix(double)>& l, double t1, double t2, int steps) {
  const Eigen::Index n = l(t1).rows();
  Matrix u = Matrix::Identity(n, n);
  const double h = (t2 - t1) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = t1 + k * h;
    const Matrix k1 = l(t) * u;
    const Matrix k2 = l(t + 0.5 * h) * (u + 0.5 * h * k1);
    const Matrix k3 = l(t + 0.5 * h) * (u + 0.5 * h * k2);
    const Matrix k4 = l(t + h) * (u + h * k3);
    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

inline Matrix pauli(int k) {
  Matrix s = Matrix::Zero(2, 2);
  if (k == 1) {
    s(0, 1) = 1.0;
    s(1, 0) = 1.0;
  } else if (k == 2) {
    s(0, 1) = -kI;
    s(1, 0) = kI;
  } else {
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
  }
  return s;
}

/// Anti-Hermitian su(2) generator -i sigma_k / 2.
inline AlgebraElement su2(int k) { return AlgebraElement(Matrix(-0.5 * kI * pauli(k))); }

}  // namespace gqm::testing
