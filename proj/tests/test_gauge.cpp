#include "doctest.h"
#include "gqm/errors.hpp"
#include "gqm/gauge.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace gqm;
using gqm::testing::max_abs;
using gqm::testing::su2;

namespace {

// U(t, x) = exp(alpha T1) exp(beta T2) with analytic derivatives.
struct TwoAngle {
  std::function<double(double, double)> alpha, beta;
  std::function<double(double, double)> alpha_t, alpha_x, beta_t, beta_x;

  GaugeTransform make() const {
    auto e1 = [](double s) { return exp_map(su2(1), s).matrix(); };
    auto e2 = [](double s) { return exp_map(su2(2), s).matrix(); };
    const Matrix t1 = su2(1).matrix(), t2 = su2(2).matrix();
    auto u = [=, *this](double t, double x) { return Matrix(e1(alpha(t, x)) * e2(beta(t, x))); };
    auto du = [=](const std::function<double(double, double)>& da, const std::function<double(double, double)>& db,
                  std::function<double(double, double)> a, std::function<double(double, double)> b) {
      return [=](double t, double x) {
        const Matrix ea = e1(a(t, x)), eb = e2(b(t, x));
        return Matrix(da(t, x) * t1 * ea * eb + db(t, x) * ea * t2 * eb);
      };
    };
    return GaugeTransform(2, u, du(alpha_t, beta_t, alpha, beta), du(alpha_x, beta_x, alpha, beta));
  }
};

TwoAngle smooth_static() {
  TwoAngle s;
  s.alpha = [](double, double x) { return 1.3 * std::sin(x); };
  s.alpha_x = [](double, double x) { return 1.3 * std::cos(x); };
  s.alpha_t = [](double, double) { return 0.0; };
  s.beta = [](double, double x) { return 0.7 * std::cos(2 * x) + 0.2 * x; };
  s.beta_x = [](double, double x) { return -1.4 * std::sin(2 * x) + 0.2; };
  s.beta_t = [](double, double) { return 0.0; };
  return s;
}

TwoAngle smooth_moving() {
  TwoAngle s;
  s.alpha = [](double t, double x) { return std::sin(x - 0.5 * t); };
  s.alpha_x = [](double t, double x) { return std::cos(x - 0.5 * t); };
  s.alpha_t = [](double t, double x) { return -0.5 * std::cos(x - 0.5 * t); };
  s.beta = [](double t, double x) { return 0.3 * t * x; };
  s.beta_x = [](double t, double) { return 0.3 * t; };
  s.beta_t = [](double, double x) { return 0.3 * x; };
  return s;
}

GaugeField1D test_field() {
  return GaugeField1D(
      2, [](double t, double x) { return su2(3) * (0.4 * std::cos(x)) + su2(1) * (0.2 * t); },
      [](double t, double x) { return su2(2) * std::exp(-x * x) + su2(3) * (0.3 * std::sin(t)); }, {});
}

// Continuum Wilson line along a straight path by RK4 in the path parameter.
Matrix continuum_wilson(const GaugeField1D& f, SpaceTimePoint p, SpaceTimePoint q, double hbar = 1.0) {
  const double dt = q.t - p.t, dx = q.x - p.x;
  return gqm::testing::rk4_ordered_exp(
      [&](double s) {
        const double t = p.t + s * dt, x = p.x + s * dx;
        return Matrix(-(f.phi(t, x).matrix() * dt + f.a(t, x).matrix() * dx) / hbar);
      },
      0.0, 1.0, 4000);
}

}  // namespace

TEST_CASE("zero field gives the identity Wilson line") {
  const auto w = wilson_line(LatticePath::straight({0, -1}, {2, 3}, 17), GaugeField1D::zero(3));
  CHECK(max_abs(w.matrix() - Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("constant spatial field reproduces exp_map(X, -l)") {
  const AlgebraElement x = su2(1) * 0.9 + su2(3) * -0.4;
  const auto f = GaugeField1D::constant(AlgebraElement::zero(2), x);
  // t must increase strictly; phi = 0 so the time extent does not enter
  const auto w = wilson_line(LatticePath::straight({0.0, 0.5}, {1.0, 3.0}, 40), f);
  CHECK(max_abs(w.matrix() - exp_map(x, -2.5).matrix()) < 1e-12);
}

TEST_CASE("Wilson line matches the continuum oracle at second order and is unitary") {
  const auto f = test_field();
  const SpaceTimePoint p{0.0, -1.0}, q{1.5, 1.2};
  const Matrix exact = continuum_wilson(f, p, q);
  const double e1 = max_abs(wilson_line(LatticePath::straight(p, q, 50), f).matrix() - exact);
  const double e2 = max_abs(wilson_line(LatticePath::straight(p, q, 100), f).matrix() - exact);
  CHECK(std::log2(e1 / e2) > 1.9);
  const Matrix w = wilson_line(LatticePath::straight(p, q, 37), f).matrix();
  CHECK(max_abs(w.adjoint() * w - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("hbar rescales the Wilson line exponent") {
  const auto f = test_field();
  const SpaceTimePoint p{0.0, -1.0}, q{1.0, 0.5};
  const Matrix exact = continuum_wilson(f, p, q, 0.5);
  CHECK(max_abs(wilson_line(LatticePath::straight(p, q, 400), f, 0.5).matrix() - exact) < 1e-4);
}

TEST_CASE("Wilson line composition is exact") {
  const auto f = test_field();
  const LatticePath path({{0, 0}, {0.2, 0.4}, {0.5, -0.3}, {0.9, 0.1}, {1.4, 1.0}, {1.5, 0.8}});
  for (int k = 1; k < path.segments(); ++k) {
    const auto [first, second] = path.split(k);
    const Matrix composed = wilson_line(second, f).matrix() * wilson_line(first, f).matrix();
    CHECK(max_abs(composed - wilson_line(path, f).matrix()) < 1e-12);
  }
  CHECK_THROWS_AS(path.split(0), InvalidArgument);
  CHECK_THROWS_AS(path.split(path.segments()), InvalidArgument);
}

TEST_CASE("LatticePath validation") {
  CHECK_THROWS_AS(LatticePath({{0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(LatticePath({{0, 0}, {0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(LatticePath({{1, 0}, {0, 1}}), InvalidArgument);
  CHECK(LatticePath::straight({0, 0}, {1, 1}, 4).refined(3).segments() == 12);
}

TEST_CASE("dimension mismatch between path field and algebra") {
  const GaugeField1D lying(
      2, [](double, double) { return AlgebraElement::zero(3); }, [](double, double) { return AlgebraElement::zero(3); },
      {});
  CHECK_THROWS_AS(wilson_line(LatticePath::straight({0, 0}, {1, 1}, 3), lying), ShapeError);
  const auto g = GaugeTransform::constant(GroupElement::identity(3));
  CHECK_THROWS_AS(gauge_transform_field(GaugeField1D::zero(2), g), ShapeError);
}

TEST_CASE("gauge transform with constant U is plain conjugation") {
  std::mt19937_64 rng(4);
  const GroupElement u = random_unitary(2, rng);
  const auto f = test_field();
  const auto ft = gauge_transform_field(f, GaugeTransform::constant(u));
  for (double x : {-1.0, 0.3, 2.0}) {
    const Matrix um = u.matrix();
    CHECK(max_abs(ft.a(0.7, x).matrix() - um * f.a(0.7, x).matrix() * um.adjoint()) < 1e-14);
    CHECK(max_abs(ft.phi(0.7, x).matrix() - um * f.phi(0.7, x).matrix() * um.adjoint()) < 1e-14);
  }
}

TEST_CASE("pure gauge of an abelian-embedded transform is -theta' T") {
  auto theta = [](double x) { return std::sin(2 * x) + 0.5 * x; };
  auto dtheta = [](double x) { return 2 * std::cos(2 * x) + 0.5; };
  const auto g = GaugeTransform::abelian_embedded(su2(3), theta, dtheta);
  const auto pg = pure_gauge(g);
  for (double x : {-2.0, 0.0, 0.4, 1.9}) {
    CHECK(max_abs(pg.a(0.0, x).matrix() - (su2(3) * -dtheta(x)).matrix()) < 1e-14);
    CHECK(max_abs(pg.phi(0.0, x).matrix()) < 1e-14);
  }
  // finite-difference fallback agrees to O(h^2) plus roundoff
  const GaugeTransform fd(2, [&](double, double x) { return exp_map(su2(3), theta(x)).matrix(); }, std::nullopt,
                          std::nullopt);
  CHECK(max_abs(pure_gauge(fd).a(0.0, 0.4).matrix() - pg.a(0.0, 0.4).matrix()) < 1e-9);
  CHECK(max_abs(pure_gauge(GaugeTransform::constant(GroupElement::identity(2))).a(0.0, 1.0).matrix()) == 0.0);
}

TEST_CASE("transformed fields stay anti-Hermitian and round-trip") {
  const auto g = smooth_moving().make();
  const auto f = test_field();
  const auto ft = gauge_transform_field(f, g);
  const auto back = gauge_transform_field(ft, g.inverse());
  for (double t : {0.0, 0.8}) {
    for (double x : {-1.5, 0.1, 2.2}) {
      const Matrix a = ft.a(t, x).matrix();
      CHECK(max_abs(a + a.adjoint()) < 1e-10);
      CHECK(max_abs(back.a(t, x).matrix() - f.a(t, x).matrix()) < 1e-10);
      CHECK(max_abs(back.phi(t, x).matrix() - f.phi(t, x).matrix()) < 1e-10);
    }
  }
  // pure gauge of U transformed by U^-1 is the zero field
  const auto z = gauge_transform_field(pure_gauge(g), g.inverse());
  CHECK(max_abs(z.a(0.3, 0.9).matrix()) < 1e-10);
  CHECK(max_abs(z.phi(0.3, 0.9).matrix()) < 1e-10);
}

TEST_CASE("non-unitary transform is rejected") {
  const GaugeTransform bad(2, [](double, double x) { return Matrix(Matrix::Identity(2, 2) * (1.0 + x)); },
                           std::nullopt, std::nullopt);
  CHECK_THROWS_AS(bad.u(0.0, 0.5), InvalidTransform);
  CHECK_THROWS_AS(gauge_transform_field(GaugeField1D::zero(2), bad).a(0.0, 0.5), InvalidTransform);
}

TEST_CASE("pure-gauge Wilson line approaches U(end) U(start)^-1 quadratically") {
  const auto g = smooth_static().make();
  const auto pg = pure_gauge(g);
  const SpaceTimePoint p{0.0, -1.0}, q{1.0, 2.0};
  const Matrix target = g.u(q.t, q.x).matrix() * g.u(p.t, p.x).inverse().matrix();
  const double e1 = max_abs(wilson_line(LatticePath::straight(p, q, 64), pg).matrix() - target);
  const double e2 = max_abs(wilson_line(LatticePath::straight(p, q, 128), pg).matrix() - target);
  CHECK(e1 < 1e-2);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("field strength of a pure gauge vanishes as the step shrinks") {
  const auto pg = pure_gauge(smooth_moving().make());
  const double f1 = max_abs(field_strength(pg, 0.4, 0.7, 1e-2));
  const double f2 = max_abs(field_strength(pg, 0.4, 0.7, 5e-3));
  CHECK(f1 < 1e-3);
  CHECK(std::log2(f1 / f2) > 1.8);
  // a generic field has curvature of order one
  CHECK(max_abs(field_strength(test_field(), 0.4, 0.7, 1e-3)) > 0.1);
}

TEST_CASE("Wilson line covariance") {
  const auto f = test_field();
  const LatticePath path = LatticePath::straight({0.0, -1.0}, {1.0, 1.5}, 100);
  std::mt19937_64 rng(12);
  SUBCASE("constant and identity transforms are exact") {
    CHECK(transform_covariance_check(path, f, GaugeTransform::constant(random_unitary(2, rng))) < 1e-10);
    CHECK(transform_covariance_check(path, f, GaugeTransform::constant(GroupElement::identity(2))) == 0.0);
  }
  SUBCASE("smooth transforms converge at second order") {
    for (const auto& g : {smooth_static().make(), smooth_moving().make()}) {
      const double d1 = transform_covariance_check(path, f, g);
      const double d2 = transform_covariance_check(path.refined(2), f, g);
      CHECK(d1 < 1e-3);
      CHECK(std::log2(d1 / d2) > 1.8);
    }
  }
  SUBCASE("hbar != 1") {
    const auto g = smooth_static().make();
    const double d1 = transform_covariance_check(path, f, g, 0.7);
    const double d2 = transform_covariance_check(path.refined(2), f, g, 0.7);
    CHECK(std::log2(d1 / d2) > 1.8);
  }
}

TEST_CASE("transform products use the product rule") {
  const auto a = smooth_static().make();
  const auto b = smooth_moving().make();
  const auto ab = a * b;
  const double t = 0.3, x = 0.8, h = 1e-5;
  const Matrix fd = (ab.u(t, x + h).matrix() - ab.u(t, x - h).matrix()) / (2 * h);
  CHECK(max_abs(ab.du_dx(t, x) - fd) < 1e-8);
  const Matrix fdt = (ab.u(t + h, x).matrix() - ab.u(t - h, x).matrix()) / (2 * h);
  CHECK(max_abs(ab.du_dt(t, x) - fdt) < 1e-8);
  CHECK(max_abs((ab * ab.inverse()).u(t, x).matrix() - Matrix::Identity(2, 2)) < 1e-13);
}

TEST_CASE("random smooth fields are anti-Hermitian and periodic") {
  std::mt19937_64 rng(77);
  const auto f = GaugeField1D::random_smooth(su_basis(2), -3.0, 5.0, 4, 0.5, rng);
  CHECK(f.time_independent());
  CHECK(max_abs(f.a(0.0, -3.0).matrix() - f.a(0.0, 5.0).matrix()) < 1e-12);
  const Matrix p = f.phi(1.0, 0.2).matrix();
  CHECK(max_abs(p + p.adjoint()) == 0.0);
  CHECK(std::abs(p.trace()) < 1e-14);
}
