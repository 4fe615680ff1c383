#include "gqm/gauge.hpp"

#include "gqm/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gqm {

// --- GaugeField1D -----------------------------------------------------------

GaugeField1D::GaugeField1D(int dim, AlgebraField phi, AlgebraField a, Traits traits)
    : dim_(dim), phi_(std::move(phi)), a_(std::move(a)), traits_(traits) {
  if (dim < 1) throw InvalidDimension("GaugeField1D: dim must be positive");
  if (!phi_ || !a_) throw InvalidArgument("GaugeField1D: empty sampler");
}

AlgebraElement GaugeField1D::phi(double t, double x) const {
  AlgebraElement v = phi_(t, x);
  if (v.dim() != dim_) throw ShapeError("GaugeField1D: phi sampler returned wrong dimension");
  return v;
}

AlgebraElement GaugeField1D::a(double t, double x) const {
  AlgebraElement v = a_(t, x);
  if (v.dim() != dim_) throw ShapeError("GaugeField1D: a sampler returned wrong dimension");
  return v;
}

GaugeField1D GaugeField1D::zero(int dim) {
  const AlgebraElement z = AlgebraElement::zero(dim);
  auto sampler = [z](double, double) { return z; };
  return GaugeField1D(dim, sampler, sampler, {.time_independent = true, .no_vector_potential = true});
}

GaugeField1D GaugeField1D::constant(const AlgebraElement& phi, const AlgebraElement& a) {
  if (phi.dim() != a.dim()) throw ShapeError("GaugeField1D::constant: dimension mismatch");
  const bool no_a = a.matrix().cwiseAbs().maxCoeff() == 0.0;
  return GaugeField1D(
      phi.dim(), [phi](double, double) { return phi; }, [a](double, double) { return a; },
      {.time_independent = true, .no_vector_potential = no_a});
}

GaugeField1D GaugeField1D::gaussian_bump(const AlgebraElement& phi0, const AlgebraElement& a0,
                                         double center, double width) {
  if (phi0.dim() != a0.dim()) throw ShapeError("GaugeField1D::gaussian_bump: dimension mismatch");
  if (!(width > 0.0)) throw InvalidArgument("GaugeField1D::gaussian_bump: width must be positive");
  auto profile = [center, width](double x) {
    const double s = (x - center) / width;
    return std::exp(-0.5 * s * s);
  };
  const bool no_a = a0.matrix().cwiseAbs().maxCoeff() == 0.0;
  return GaugeField1D(
      phi0.dim(), [phi0, profile](double, double x) { return phi0 * profile(x); },
      [a0, profile](double, double x) { return a0 * profile(x); },
      {.time_independent = true, .no_vector_potential = no_a});
}

GaugeField1D GaugeField1D::random_smooth(const AlgebraBasis& basis, double x_min, double x_max,
                                         int modes, double amplitude, std::mt19937_64& rng) {
  if (!(x_max > x_min)) throw InvalidArgument("GaugeField1D::random_smooth: empty interval");
  if (modes < 1) throw InvalidArgument("GaugeField1D::random_smooth: modes must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = basis.size();
  // coeffs[component][generator][mode] = (cos, sin) amplitudes
  struct Mode {
    double c, s;
  };
  std::vector<Mode> table(static_cast<std::size_t>(2) * d * modes);
  for (auto& m : table) m = {normal(rng), normal(rng)};
  auto sampler = [basis, table, d, modes, x_min, length = x_max - x_min, amplitude](int component) {
    return [=](double, double x) {
      std::vector<double> c(d, 0.0);
      const double phase = 2.0 * std::numbers::pi * (x - x_min) / length;
      for (int a = 0; a < d; ++a) {
        for (int k = 1; k <= modes; ++k) {
          const Mode& m = table[(static_cast<std::size_t>(component) * d + a) * modes + (k - 1)];
          c[a] += amplitude / k * (m.c * std::cos(k * phase) + m.s * std::sin(k * phase));
        }
      }
      return basis.combine(c);
    };
  };
  return GaugeField1D(basis.dim(), sampler(0), sampler(1), {.time_independent = true});
}

// --- GaugeTransform ---------------------------------------------------------

GaugeTransform::GaugeTransform(int dim, MatrixField u, std::optional<MatrixField> du_dt,
                               std::optional<MatrixField> du_dx, double length_scale,
                               bool time_independent)
    : dim_(dim),
      u_(std::move(u)),
      du_dt_(std::move(du_dt)),
      du_dx_(std::move(du_dx)),
      fd_step_(1e-5 * length_scale),
      time_independent_(time_independent) {
  if (dim < 1) throw InvalidDimension("GaugeTransform: dim must be positive");
  if (!u_) throw InvalidArgument("GaugeTransform: empty sampler");
  if (!(length_scale > 0.0)) throw InvalidArgument("GaugeTransform: length scale must be positive");
}

GroupElement GaugeTransform::u(double t, double x) const {
  Matrix m = u_(t, x);
  if (m.rows() != dim_ || m.cols() != dim_) throw ShapeError("GaugeTransform: wrong dimension");
  return GroupElement(std::move(m));
}

Matrix GaugeTransform::du_dt(double t, double x) const {
  if (du_dt_) return (*du_dt_)(t, x);
  if (time_independent_) return Matrix::Zero(dim_, dim_);
  const double h = fd_step_;
  return (u_(t + h, x) - u_(t - h, x)) / (2.0 * h);
}

Matrix GaugeTransform::du_dx(double t, double x) const {
  if (du_dx_) return (*du_dx_)(t, x);
  const double h = fd_step_;
  return (u_(t, x + h) - u_(t, x - h)) / (2.0 * h);
}

GaugeTransform GaugeTransform::inverse() const {
  const GaugeTransform self = *this;
  auto u = [self](double t, double x) -> Matrix { return self.u_(t, x).adjoint(); };
  auto dt = [self](double t, double x) -> Matrix { return self.du_dt(t, x).adjoint(); };
  auto dx = [self](double t, double x) -> Matrix { return self.du_dx(t, x).adjoint(); };
  GaugeTransform out(dim_, u, dt, dx, 1.0, time_independent_);
  out.fd_step_ = fd_step_;
  return out;
}

GaugeTransform GaugeTransform::operator*(const GaugeTransform& other) const {
  if (dim_ != other.dim_) throw ShapeError("GaugeTransform: dimension mismatch");
  const GaugeTransform lhs = *this;
  const GaugeTransform rhs = other;
  auto u = [lhs, rhs](double t, double x) -> Matrix { return lhs.u_(t, x) * rhs.u_(t, x); };
  auto dt = [lhs, rhs](double t, double x) -> Matrix {
    return lhs.du_dt(t, x) * rhs.u_(t, x) + lhs.u_(t, x) * rhs.du_dt(t, x);
  };
  auto dx = [lhs, rhs](double t, double x) -> Matrix {
    return lhs.du_dx(t, x) * rhs.u_(t, x) + lhs.u_(t, x) * rhs.du_dx(t, x);
  };
  GaugeTransform out(dim_, u, dt, dx, 1.0, time_independent_ && other.time_independent_);
  out.fd_step_ = std::min(fd_step_, other.fd_step_);
  return out;
}

GaugeTransform GaugeTransform::constant(const GroupElement& u) {
  const Matrix m = u.matrix();
  const int n = u.dim();
  auto zero = [n](double, double) -> Matrix { return Matrix::Zero(n, n); };
  return GaugeTransform(
      n, [m](double, double) { return m; }, zero, zero, 1.0, true);
}

GaugeTransform GaugeTransform::abelian_embedded(const AlgebraElement& generator,
                                                std::function<double(double)> theta,
                                                std::function<double(double)> dtheta) {
  const Matrix t = generator.matrix();
  const int n = generator.dim();
  auto u = [t, theta](double, double x) -> Matrix { return matrix_exp(theta(x) * t); };
  auto dx = [t, theta, dtheta](double, double x) -> Matrix {
    return dtheta(x) * t * matrix_exp(theta(x) * t);
  };
  auto dt = [n](double, double) -> Matrix { return Matrix::Zero(n, n); };
  return GaugeTransform(n, u, dt, dx, 1.0, true);
}

// --- LatticePath ------------------------------------------------------------

LatticePath::LatticePath(std::vector<SpaceTimePoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("LatticePath: need at least two points");
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (!(points_[k].t > points_[k - 1].t)) {
      throw InvalidArgument("LatticePath: time must be strictly increasing");
    }
  }
}

LatticePath LatticePath::straight(SpaceTimePoint from, SpaceTimePoint to, int segments) {
  if (segments < 1) throw InvalidArgument("LatticePath::straight: segments must be positive");
  std::vector<SpaceTimePoint> pts(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double s = static_cast<double>(k) / segments;
    pts[k] = {from.t + s * (to.t - from.t), from.x + s * (to.x - from.x)};
  }
  pts.back() = to;
  return LatticePath(std::move(pts));
}

LatticePath LatticePath::refined(int factor) const {
  if (factor < 1) throw InvalidArgument("LatticePath::refined: factor must be positive");
  std::vector<SpaceTimePoint> pts;
  pts.reserve(static_cast<std::size_t>(segments()) * factor + 1);
  for (int k = 0; k < segments(); ++k) {
    const auto& p = points_[k];
    const auto& q = points_[k + 1];
    for (int j = 0; j < factor; ++j) {
      const double s = static_cast<double>(j) / factor;
      pts.push_back({p.t + s * (q.t - p.t), p.x + s * (q.x - p.x)});
    }
  }
  pts.push_back(points_.back());
  return LatticePath(std::move(pts));
}

std::pair<LatticePath, LatticePath> LatticePath::split(int index) const {
  if (index <= 0 || index >= segments()) throw InvalidArgument("LatticePath::split: index not interior");
  std::vector<SpaceTimePoint> first(points_.begin(), points_.begin() + index + 1);
  std::vector<SpaceTimePoint> second(points_.begin() + index, points_.end());
  return {LatticePath(std::move(first)), LatticePath(std::move(second))};
}

// --- Wilson lines and transformations --------------------------------------

GroupAlgebraElement wilson_line(const LatticePath& path, const GaugeField1D& field, double hbar) {
  const auto& pts = path.points();
  Matrix w = Matrix::Identity(field.dim(), field.dim());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double tm = 0.5 * (pts[k].t + pts[k - 1].t);
    const double xm = 0.5 * (pts[k].x + pts[k - 1].x);
    const double dt = pts[k].t - pts[k - 1].t;
    const double dx = pts[k].x - pts[k - 1].x;
    const Matrix exponent = -(field.phi(tm, xm).matrix() * dt + field.a(tm, xm).matrix() * dx) / hbar;
    w = matrix_exp(exponent) * w;
  }
  return GroupAlgebraElement(std::move(w));
}

GaugeField1D gauge_transform_field(const GaugeField1D& field, const GaugeTransform& g,
                                   double hbar) {
  if (field.dim() != g.dim()) throw ShapeError("gauge_transform_field: dimension mismatch");
  auto phi = [field, g, hbar](double t, double x) {
    const Matrix u = g.u(t, x).matrix();
    return AlgebraElement(Matrix(u * field.phi(t, x).matrix() * u.adjoint() +
                                 hbar * u * g.du_dt(t, x).adjoint()));
  };
  auto a = [field, g, hbar](double t, double x) {
    const Matrix u = g.u(t, x).matrix();
    return AlgebraElement(Matrix(u * field.a(t, x).matrix() * u.adjoint() +
                                 hbar * u * g.du_dx(t, x).adjoint()));
  };
  GaugeField1D::Traits traits;
  traits.time_independent = field.time_independent() && g.time_independent();
  return GaugeField1D(field.dim(), phi, a, traits);
}

GaugeField1D pure_gauge(const GaugeTransform& g, double hbar) {
  return gauge_transform_field(GaugeField1D::zero(g.dim()), g, hbar);
}

double transform_covariance_check(const LatticePath& path, const GaugeField1D& field,
                                  const GaugeTransform& g, double hbar) {
  const GaugeField1D transformed = gauge_transform_field(field, g, hbar);
  const Matrix lhs = wilson_line(path, transformed, hbar).matrix();
  const Matrix u_end = g.u(path.back().t, path.back().x).matrix();
  const Matrix u_start = g.u(path.front().t, path.front().x).matrix();
  const Matrix rhs = u_end * wilson_line(path, field, hbar).matrix() * u_start.adjoint();
  return (lhs - rhs).norm();
}

Matrix field_strength(const GaugeField1D& field, double t, double x, double h) {
  const Matrix da_dt = (field.a(t + h, x).matrix() - field.a(t - h, x).matrix()) / (2.0 * h);
  const Matrix dphi_dx = (field.phi(t, x + h).matrix() - field.phi(t, x - h).matrix()) / (2.0 * h);
  const Matrix phi = field.phi(t, x).matrix();
  const Matrix a = field.a(t, x).matrix();
  return da_dt - dphi_dx + phi * a - a * phi;
}

}  // namespace gqm
