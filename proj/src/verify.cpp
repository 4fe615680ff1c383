#include "gqm/verify.hpp"

#include "gqm/dynamics_path.hpp"
#include "gqm/dynamics_pde.hpp"
#include "gqm/errors.hpp"
#include "gqm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gqm {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "gauge", "pde", "path", "measurement"};
  return names;
}

namespace {

CheckResult below(std::string name, double measured, double threshold) {
  return {std::move(name), measured < threshold, measured, threshold, "<"};
}

CheckResult at_least(std::string name, double measured, double threshold) {
  return {std::move(name), measured >= threshold, measured, threshold, ">="};
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

AlgebraElement pauli_generator(int k) {
  Matrix s = Matrix::Zero(2, 2);
  if (k == 1) {
    s(0, 1) = s(1, 0) = 1.0;
  } else if (k == 2) {
    s(0, 1) = -kI;
    s(1, 0) = kI;
  } else {
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
  }
  return AlgebraElement(Matrix(-0.5 * kI * s));
}

// Smooth periodic SU(2) transform on [0, length).
GaugeTransform smooth_transform(double length) {
  const double w = 2 * std::numbers::pi / length;
  return GaugeTransform::abelian_embedded(
             pauli_generator(1), [w](double x) { return 0.8 * std::sin(w * x); },
             [w](double x) { return 0.8 * w * std::cos(w * x); }) *
         GaugeTransform::abelian_embedded(
             pauli_generator(2), [w](double x) { return 0.5 * std::cos(2 * w * x); },
             [w](double x) { return -w * std::sin(2 * w * x); });
}

SuiteReport algebra_suite(std::mt19937_64& rng) {
  SuiteReport r{"algebra", {}};
  const AlgebraBasis u3 = u_basis(3);
  double unitarity = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix u = exp_map(random_algebra_element(u3, rng, 3.0), 1.0).matrix();
    unitarity = std::max(unitarity, max_abs(u.adjoint() * u - Matrix::Identity(3, 3)));
  }
  r.checks.push_back(below("exp_map unitarity", unitarity, 1e-12));

  const AlgebraBasis su3 = su_basis(3);
  double closure = 0.0;
  for (int a = 0; a < su3.size(); ++a) {
    for (int b = 0; b < su3.size(); ++b) {
      double residual = 0.0;
      su3.coordinates(su3.generators[a].commutator(su3.generators[b]), &residual);
      closure = std::max(closure, residual);
    }
  }
  r.checks.push_back(below("su(3) commutator closure", closure, 1e-10));

  double invariance = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 4;
    const auto g = random_group_algebra_element(n, rng);
    const auto u = random_unitary(n, rng).as_algebra_element();
    const double p = probability(g);
    invariance = std::max({invariance, std::abs(probability(u * g) - p) / p, std::abs(probability(g * u) - p) / p});
  }
  r.checks.push_back(below("probability invariance under unitaries", invariance, 1e-12));

  const AlgebraBasis su2 = su_basis(2);
  double bch = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto a = random_algebra_element(su2, rng);
    const auto b = random_algebra_element(su2, rng);
    auto defect = [&](double eps) {
      return (exp_map(a + b, eps).matrix() - (exp_map(a, eps) * exp_map(b, eps)).matrix()).norm();
    };
    bch = std::max(bch, std::abs(defect(1e-2) / defect(5e-3) - 4.0));
  }
  r.checks.push_back(below("BCH defect ratio |ratio - 4|", bch, 0.5));

  const auto x = random_algebra_element(su2, rng);
  const auto y = random_algebra_element(su2, rng);
  auto family = [&](double t) { return x * std::cos(2 * t) + y * t; };
  auto u = [&](int steps) { return time_ordered_exp(family, 0.0, 1.0, steps).matrix(); };
  const Matrix u1 = u(64), u2 = u(128), u4 = u(256);
  r.checks.push_back(at_least("time-ordered exp self-convergence order", std::log2(max_abs(u1 - u2) / max_abs(u2 - u4)), 1.9));
  return r;
}

SuiteReport gauge_suite(std::mt19937_64& rng) {
  SuiteReport r{"gauge", {}};
  const AlgebraBasis su2 = su_basis(2);
  const auto field = GaugeField1D::random_smooth(su2, 0.0, 6.0, 3, 0.8, rng);
  const LatticePath path = LatticePath::straight({0.0, 0.5}, {1.0, 4.5}, 100);

  double composition = 0.0;
  for (int k : {10, 50, 90}) {
    const auto [first, second] = path.split(k);
    composition = std::max(composition, max_abs((wilson_line(second, field) * wilson_line(first, field)).matrix() -
                                                wilson_line(path, field).matrix()));
  }
  r.checks.push_back(below("Wilson line composition", composition, 1e-12));

  const auto x = random_algebra_element(su2, rng);
  const auto constant = GaugeField1D::constant(AlgebraElement::zero(2), x);
  const double l = 2.5;
  r.checks.push_back(below("Wilson line of a constant field",
                           max_abs(wilson_line(LatticePath::straight({0, 0}, {1, l}, 30), constant).matrix() -
                                   exp_map(x, -l).matrix()),
                           1e-12));

  const Matrix w = wilson_line(path, field).matrix();
  r.checks.push_back(below("Wilson line unitarity", max_abs(w.adjoint() * w - Matrix::Identity(2, 2)), 1e-12));

  const auto g = smooth_transform(6.0);
  const double d1 = transform_covariance_check(path, field, g);
  const double d2 = transform_covariance_check(path.refined(2), field, g);
  r.checks.push_back(at_least("Wilson line covariance order", std::log2(d1 / d2), 1.8));

  const auto back = gauge_transform_field(pure_gauge(g), g.inverse());
  double zero = 0.0;
  for (double xx : {0.3, 2.0, 4.4}) zero = std::max({zero, max_abs(back.a(0, xx).matrix()), max_abs(back.phi(0, xx).matrix())});
  r.checks.push_back(below("pure gauge round trip", zero, 1e-10));
  return r;
}

SuiteReport pde_suite(std::mt19937_64& rng) {
  SuiteReport r{"pde", {}};
  const AlgebraBasis su2 = su_basis(2);
  const Grid1D grid(0.0, 20.0, 128);
  const auto field = GaugeField1D::random_smooth(su2, 0.0, 20.0, 4, 1.0, rng);
  EvolutionConfig cfg;

  Wavefunction p1(grid, 2), p2(grid, 2);
  for (int j = 0; j < grid.n_sites(); ++j) {
    p1.set(j, random_group_algebra_element(2, rng));
    p2.set(j, random_group_algebra_element(2, rng));
  }
  const Complex lhs = lattice_inner_product(p1, apply_generator(p2, field, cfg));
  const Complex rhs = -lattice_inner_product(apply_generator(p1, field, cfg), p2);
  r.checks.push_back(below("generator anti-Hermiticity", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-12));

  r.checks.push_back(below("Hamiltonian consistency", hamiltonian_consistency_check(field, cfg, grid), 1e-12));

  const auto psi0 = Wavefunction::gaussian_packet(grid, 10.0, 1.5, 1.0, random_group_algebra_element(2, rng));
  const double n0 = total_probability(psi0);
  const auto out = evolve(psi0, field, cfg, 1000 * cfg.dt).final_state;
  r.checks.push_back(below("norm drift over 1000 steps", std::abs(total_probability(out) - n0) / n0, 1e-8));

  const Grid1D wide(-40.0, 40.0, 512);
  const double s0 = 2.0, t = 4.0;
  const auto packet = Wavefunction::gaussian_packet(wide, 0.0, s0, 0.0, GroupAlgebraElement::identity(1));
  const double width = position_moments(evolve(packet, GaugeField1D::zero(1), cfg, t).final_state).width;
  const double expected = s0 * std::sqrt(1 + std::pow(t / (2 * s0 * s0), 2));
  r.checks.push_back(below("free packet width law (relative)", std::abs(width / expected - 1), 5e-3));

  // keep the packet tail and the non-periodic bump away from the periodic seam
  const double l = 20.0;
  const auto g = smooth_transform(l);
  const auto bump = GaugeField1D::gaussian_bump(pauli_generator(3) * 0.5, pauli_generator(1) * 0.3, 10.0, 1.5);
  const auto bump_t = gauge_transform_field(bump, g);
  auto defect = [&](int n, double dt) {
    const Grid1D gr(0.0, l, n);
    const auto a0 = Wavefunction::gaussian_packet(gr, 10.0, 1.0, 0.5, GroupAlgebraElement::identity(2));
    Wavefunction b0 = a0;
    for (int j = 0; j < n; ++j) b0.block(j) = g.u(0, gr.x(j)).matrix() * a0.block(j);
    EvolutionConfig c;
    c.dt = dt;
    const auto a = evolve(a0, bump, c, 1.0).final_state;
    auto b = evolve(b0, bump_t, c, 1.0).final_state;
    for (int j = 0; j < n; ++j) b.block(j) = g.u(0, gr.x(j)).matrix().adjoint() * b.block(j);
    return l2_distance(a, b);
  };
  r.checks.push_back(at_least("evolution covariance order", std::log2(defect(200, 0.02) / defect(400, 0.01)), 1.8));
  return r;
}

SuiteReport path_suite(std::mt19937_64& rng, int threads) {
  SuiteReport r{"path", {}};
  const AlgebraBasis su2 = su_basis(2);
  const auto field = GaugeField1D::random_smooth(su2, -3.0, 3.0, 3, 1.0, rng);
  KernelConfig cfg;
  cfg.epsilon = 0.05;
  cfg.threads = threads;

  KernelConfig exact = cfg;
  exact.eta = 0.0;
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  double anti = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix x = kernel_exponent(pos(rng), pos(rng), 0.0, field, exact, 1.0, 1.0);
    anti = std::max(anti, max_abs(x + x.adjoint()));
  }
  r.checks.push_back(below("kernel exponent anti-Hermiticity", anti, 1e-12));

  const Grid1D grid(-3.0, 3.0, 128);
  const auto p13 = finite_propagator(grid, field, cfg, 0.0, 0.25, 1, 1);
  const auto p12 = finite_propagator(grid, field, cfg, 0.0, 0.1, 1, 1);
  const auto p23 = finite_propagator(grid, field, cfg, 0.1, 0.25, 1, 1);
  r.checks.push_back(below("propagator composition", max_abs((p23 * p12).entries() - p13.entries()), 1e-10));

  Wavefunction ones(grid, 2);
  for (int j = 0; j < grid.n_sites(); ++j) ones.block(j) = Matrix::Identity(2, 2);
  const auto stepped = huygens_step(ones, GaugeField1D::zero(2), cfg, 1, 1);
  r.checks.push_back(below("zeroth-order normalization", max_abs(stepped.block(64) - Matrix::Identity(2, 2)), 1e-3));

  const double l = 20.0, eps0 = 0.04;
  const int n0 = static_cast<int>(std::ceil(l / (std::sqrt(eps0) / 4)));
  std::vector<Resolution> res;
  for (int k = 0; k < 3; ++k) res.push_back({eps0 / (1 << k), Grid1D(-l / 2, l / 2, n0 << k)});
  KernelConfig base;
  base.window = 16;
  base.eta = 0.0;
  base.threads = threads;
  const auto bump = GaugeField1D::gaussian_bump(pauli_generator(3) * 2.0, pauli_generator(1) * 1.5, 0.5, 2.0);
  const auto report = compare_with_pde(
      [](const Grid1D& g) { return Wavefunction::gaussian_packet(g, -1.0, 1.0, 1.0, GroupAlgebraElement::identity(2)); },
      bump, 1, 1, 0.4, res, base);
  r.checks.push_back(at_least("path vs PDE convergence order", report.monotone() ? report.min_order() : 0.0, 1.0));
  return r;
}

SuiteReport measurement_suite(std::mt19937_64& rng) {
  SuiteReport r{"measurement", {}};
  const Grid1D grid(0.0, 3.0, 32);
  const auto obs = Observable::random_hermitian(grid, rng);
  double parseval = 0.0;
  for (int k = 0; k < 20; ++k) {
    Wavefunction psi(grid, 2);
    for (int j = 0; j < grid.n_sites(); ++j) psi.set(j, random_group_algebra_element(2, rng));
    double lhs = 0.0;
    for (const auto& c : expand(psi, obs).coefficients) lhs += probability(c);
    const double rhs = total_probability(psi);
    parseval = std::max(parseval, std::abs(lhs - rhs) / rhs);
  }
  r.checks.push_back(below("Parseval identity", parseval, 1e-10));

  const auto g = random_group_algebra_element(2, rng);
  Wavefunction single(grid, 2);
  for (int j = 0; j < grid.n_sites(); ++j) single.block(j) = obs.eigenfunctions()(j, 7) * g.matrix();
  const auto dist = outcome_probabilities(expand(single, obs));
  double best = 0.0;
  for (const auto& o : dist.outcomes) best = std::max(best, o.probability);
  r.checks.push_back(below("single eigenfunction outcome |p - 1|", std::abs(best - 1.0), 1e-10));

  Wavefunction psi(grid, 3);
  for (int j = 0; j < grid.n_sites(); ++j) psi.set(j, random_group_algebra_element(3, rng));
  const auto a = outcome_probabilities(expand(psi, obs));
  const auto b = outcome_probabilities(expand(psi.left_multiplied(random_unitary(3, rng).matrix()), obs));
  double diff = 0.0;
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) diff = std::max(diff, std::abs(a.outcomes[k].probability - b.outcomes[k].probability));
  r.checks.push_back(below("left unitary invariance", diff, 1e-13));
  return r;
}

}  // namespace

std::vector<SuiteReport> run_verification(const std::string& suite, std::uint64_t seed, int threads) {
  std::vector<std::string> which;
  if (suite == "all") {
    which = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    which = {suite};
  } else {
    throw InvalidArgument("unknown suite '" + suite + "' (expected algebra, gauge, pde, path, measurement or all)");
  }
  std::vector<SuiteReport> out;
  for (const auto& name : which) {
    // each suite gets its own stream so results do not depend on which others ran
    const auto index = std::find(suite_names().begin(), suite_names().end(), name) - suite_names().begin();
    std::mt19937_64 rng(seed + 7919 * static_cast<std::uint64_t>(index));
    if (name == "algebra") out.push_back(algebra_suite(rng));
    if (name == "gauge") out.push_back(gauge_suite(rng));
    if (name == "pde") out.push_back(pde_suite(rng));
    if (name == "path") out.push_back(path_suite(rng, threads));
    if (name == "measurement") out.push_back(measurement_suite(rng));
  }
  return out;
}

}  // namespace gqm
