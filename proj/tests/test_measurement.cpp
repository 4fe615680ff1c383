#include "doctest.h"
#include "gqm/dynamics_pde.hpp"
#include "gqm/errors.hpp"
#include "gqm/measurement.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace gqm;
using gqm::testing::max_abs;

namespace {

Wavefunction random_state(const Grid1D& g, int dim, std::mt19937_64& rng) {
  Wavefunction psi(g, dim);
  for (int j = 0; j < g.n_sites(); ++j) psi.set(j, random_group_algebra_element(dim, rng));
  return psi;
}

Expansion by_hand(std::vector<double> values, std::vector<Matrix> coeffs) {
  Expansion e;
  e.eigenvalues = std::move(values);
  for (auto& c : coeffs) e.coefficients.emplace_back(c);
  return e;
}

}  // namespace

TEST_CASE("observable eigenfunctions are orthonormal with the lattice measure") {
  const Grid1D g(0.0, 3.0, 24);
  std::mt19937_64 rng(1);
  const auto obs = Observable::random_hermitian(g, rng);
  const Matrix& v = obs.eigenfunctions();
  const Matrix gram = v.adjoint() * v * g.spacing();
  CHECK(max_abs(gram - Matrix::Identity(24, 24)) < 1e-10);
  Matrix bad = Matrix::Identity(24, 24);
  bad(0, 1) = kI;
  CHECK_THROWS_AS(Observable("bad", bad, g), InvalidArgument);
  CHECK_THROWS_AS(Observable("small", Matrix::Identity(3, 3), g), ShapeError);
}

TEST_CASE("expansion of a single eigenfunction") {
  const Grid1D g(0.0, 3.0, 24);
  std::mt19937_64 rng(2);
  const auto obs = Observable::random_hermitian(g, rng);
  const GroupAlgebraElement factor = random_group_algebra_element(2, rng);
  Wavefunction psi(g, 2);
  const int n = 5;
  for (int j = 0; j < 24; ++j) psi.block(j) = obs.eigenfunctions()(j, n) * factor.matrix();
  const Expansion e = expand(psi, obs);
  for (int k = 0; k < 24; ++k) {
    const Matrix expected = k == n ? factor.matrix() : Matrix::Zero(2, 2);
    CHECK(max_abs(e.coefficients[k].matrix() - expected) < 1e-12);
  }
  const auto dist = outcome_probabilities(e);
  double at_n = 0.0;
  for (const auto& o : dist.outcomes) {
    if (std::abs(o.value - obs.eigenvalues()(n)) < 1e-12) at_n = o.probability;
  }
  CHECK(at_n == doctest::Approx(1.0).epsilon(1e-12));

  const Expansion zero = expand(Wavefunction(g, 2), obs);
  for (const auto& c : zero.coefficients) CHECK(max_abs(c.matrix()) == 0.0);
  CHECK_THROWS_AS(outcome_probabilities(zero), UndefinedDistribution);
  CHECK_THROWS_AS(expand(Wavefunction(Grid1D(0.0, 3.0, 32), 2), obs), ShapeError);
}

TEST_CASE("Parseval identity and reconstruction for random states") {
  const Grid1D g(-1.0, 2.0, 30);
  std::mt19937_64 rng(3);
  const auto obs = Observable::random_hermitian(g, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = random_state(g, 1 + trial % 3, rng);
    const Expansion e = expand(psi, obs);
    double lhs = 0.0;
    for (const auto& c : e.coefficients) lhs += probability(c);
    const double rhs = total_probability(psi);
    CHECK(std::abs(lhs - rhs) < 1e-10 * rhs);
    CHECK(max_abs(reconstruct(e, obs).values() - psi.values()) < 1e-10);
    CHECK(outcome_probabilities(e).total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("outcome probabilities from hand-built coefficients") {
  const Matrix id = Matrix::Identity(2, 2);
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  const auto half = outcome_probabilities(by_hand({1.0, 2.0}, {id, id}));
  CHECK(half.outcomes[0].probability == doctest::Approx(0.5));
  CHECK(half.outcomes[1].probability == doctest::Approx(0.5));
  const auto third = outcome_probabilities(by_hand({1.0, 2.0}, {p0, id}));
  CHECK(third.outcomes[0].probability == doctest::Approx(1.0 / 3));
  CHECK(third.outcomes[1].probability == doctest::Approx(2.0 / 3));
  const auto single = outcome_probabilities(by_hand({-1.0, 0.5, 3.0}, {Matrix::Zero(2, 2), p0, Matrix::Zero(2, 2)}));
  CHECK(single.outcomes[1].probability == 1.0);
  CHECK(single.outcomes[0].probability == 0.0);
}

TEST_CASE("degenerate eigenvalues are merged and labels do not matter") {
  const Matrix id = Matrix::Identity(1, 1);
  const auto d = outcome_probabilities(by_hand({2.0, 1.0, 2.0 + 1e-12, 3.0}, {id, id, 2.0 * id, id}));
  REQUIRE(d.outcomes.size() == 3);
  CHECK(d.outcomes[1].value == doctest::Approx(2.0));
  CHECK(d.outcomes[1].coefficients.size() == 2);
  CHECK(d.outcomes[1].probability == doctest::Approx(5.0 / 7));
  // permuting the input order leaves the distribution unchanged
  const auto p = outcome_probabilities(by_hand({3.0, 2.0 + 1e-12, 1.0, 2.0}, {id, 2.0 * id, id, id}));
  for (std::size_t k = 0; k < 3; ++k) CHECK(p.outcomes[k].probability == doctest::Approx(d.outcomes[k].probability));
}

TEST_CASE("left unitary factors leave outcome probabilities unchanged") {
  const Grid1D g(0.0, 1.0, 16);
  std::mt19937_64 rng(4);
  const auto obs = Observable::momentum(g, 0.8);
  const auto psi = random_state(g, 3, rng);
  const auto rotated = psi.left_multiplied(random_unitary(3, rng).matrix());
  const auto a = outcome_probabilities(expand(psi, obs));
  const auto b = outcome_probabilities(expand(rotated, obs));
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
    CHECK(std::abs(a.outcomes[k].probability - b.outcomes[k].probability) < 1e-14);
  }
}

TEST_CASE("position distribution") {
  const Grid1D g(0.0, 1.0, 16);
  Wavefunction spike(g, 2);
  Matrix m(2, 2);
  m << 1, 2, 0, kI;
  spike.set(9, GroupAlgebraElement(m));
  const auto d = position_distribution(spike);
  CHECK(d.outcomes[9].probability == 1.0);
  CHECK(d.outcomes[9].value == g.x(9));
  CHECK_THROWS_AS(position_distribution(Wavefunction(g, 2)), UndefinedDistribution);

  std::mt19937_64 rng(5);
  const auto psi = random_state(g, 2, rng);
  const auto pd = position_distribution(psi);
  const auto rho = density(psi);
  const double total = total_probability(psi);
  for (int j = 0; j < 16; ++j) CHECK(std::abs(pd.outcomes[j].probability - rho[j] * g.spacing() / total) < 1e-14);
  const auto pr = position_distribution(psi.left_multiplied(random_unitary(2, rng).matrix()));
  for (int j = 0; j < 16; ++j) CHECK(std::abs(pr.outcomes[j].probability - pd.outcomes[j].probability) < 1e-14);
}

TEST_CASE("position observable expansion reproduces the position distribution") {
  const Grid1D g(0.0, 1.0, 16);
  std::mt19937_64 rng(6);
  const auto psi = random_state(g, 2, rng);
  const auto via_obs = outcome_probabilities(expand(psi, Observable::position(g)));
  const auto direct = position_distribution(psi);
  for (int j = 0; j < 16; ++j) {
    CHECK(via_obs.outcomes[j].value == doctest::Approx(direct.outcomes[j].value));
    CHECK(std::abs(via_obs.outcomes[j].probability - direct.outcomes[j].probability) < 1e-12);
  }
}
