#include "cutpatch/geometry.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace cutpatch::geometry {

namespace {

constexpr double kSingularThreshold = 1e-10;

Mat2 rotation(double angle) {
  Mat2 R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return R;
}

}  // namespace

// ---------------------------------------------------------------- charts

CubeSphereChart::CubeSphereChart(const Vec3& normal, const Vec3& e1, const Vec3& e2)
    : n_(normal), e1_(e1), e2_(e2) {}

Vec3 CubeSphereChart::face_point(const Vec2& u) const {
  return n_ + (2.0 * u[0] - 1.0) * e1_ + (2.0 * u[1] - 1.0) * e2_;
}

Vec3 CubeSphereChart::eval(const Vec2& u) const { return face_point(u).normalized(); }

Mat32 CubeSphereChart::jacobian(const Vec2& u) const {
  const Vec3 P = face_point(u);
  const double r = P.norm();
  const double r3 = r * r * r;
  const std::array<Vec3, 2> dP{2.0 * e1_, 2.0 * e2_};
  Mat32 J;
  for (int k = 0; k < 2; ++k) J.col(k) = dP[k] / r - P * (P.dot(dP[k])) / r3;
  return J;
}

Hessian CubeSphereChart::hessian(const Vec2& u) const {
  const Vec3 P = face_point(u);
  const double r = P.norm();
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  const std::array<Vec3, 2> dP{2.0 * e1_, 2.0 * e2_};
  Hessian H;
  for (int k = 0; k < 2; ++k) {
    for (int l = k; l < 2; ++l) {
      const double pk = P.dot(dP[k]);
      const double pl = P.dot(dP[l]);
      H.d[k + l] = -dP[k] * pl / r3 - dP[l] * pk / r3 - P * dP[k].dot(dP[l]) / r3 +
                   3.0 * P * pk * pl / r5;
    }
  }
  return H;
}

TorusChart::TorusChart(double minor_radius, double major_radius, double theta0, double dtheta,
                       double phi0, double dphi)
    : r_(minor_radius), R_(major_radius), t0_(theta0), dt_(dtheta), p0_(phi0), dp_(dphi) {}

Vec2 TorusChart::angles(const Vec2& u) const { return {t0_ + dt_ * u[0], p0_ + dp_ * u[1]}; }

Vec3 TorusChart::eval(const Vec2& u) const {
  const Vec2 a = angles(u);
  const double rho = R_ + r_ * std::cos(a[0]);
  return {rho * std::cos(a[1]), rho * std::sin(a[1]), r_ * std::sin(a[0])};
}

Mat32 TorusChart::jacobian(const Vec2& u) const {
  const Vec2 a = angles(u);
  const double st = std::sin(a[0]), ct = std::cos(a[0]);
  const double sp = std::sin(a[1]), cp = std::cos(a[1]);
  const double rho = R_ + r_ * ct;
  Mat32 J;
  J.col(0) = dt_ * Vec3(-r_ * st * cp, -r_ * st * sp, r_ * ct);
  J.col(1) = dp_ * Vec3(-rho * sp, rho * cp, 0.0);
  return J;
}

Hessian TorusChart::hessian(const Vec2& u) const {
  const Vec2 a = angles(u);
  const double st = std::sin(a[0]), ct = std::cos(a[0]);
  const double sp = std::sin(a[1]), cp = std::cos(a[1]);
  const double rho = R_ + r_ * ct;
  Hessian H;
  H.d[0] = dt_ * dt_ * Vec3(-r_ * ct * cp, -r_ * ct * sp, -r_ * st);
  H.d[1] = dt_ * dp_ * Vec3(r_ * st * sp, -r_ * st * cp, 0.0);
  H.d[2] = dp_ * dp_ * Vec3(-rho * cp, -rho * sp, 0.0);
  return H;
}

FlatChart::FlatChart(const Vec2& origin, const Vec2& scale) : origin_(origin), scale_(scale) {}

Vec3 FlatChart::eval(const Vec2& u) const {
  return {origin_[0] + scale_[0] * u[0], origin_[1] + scale_[1] * u[1], 0.0};
}

Mat32 FlatChart::jacobian(const Vec2&) const {
  Mat32 J = Mat32::Zero();
  J(0, 0) = scale_[0];
  J(1, 1) = scale_[1];
  return J;
}

Hessian FlatChart::hessian(const Vec2&) const { return {}; }

// ---------------------------------------------------------------- placement

RefPoint Placement::to_reference(const Vec2& u) const {
  return center + scale * (rotation(angle) * (u - center)) + shift;
}

Vec2 Placement::to_chart(const RefPoint& x) const {
  return center + chart_linear() * (x - center - shift);
}

Mat2 Placement::chart_linear() const { return rotation(-angle) / scale; }

PatchMap::PatchMap(std::shared_ptr<const Chart> chart, Placement placement)
    : chart_(std::move(chart)), placement_(placement) {
  if (!chart_) throw Error(ErrorCode::invalid_input, "patch map without chart");
  if (!(placement_.scale > 0.0)) throw Error(ErrorCode::invalid_input, "placement scale must be positive");
}

AmbientPoint PatchMap::eval(const RefPoint& x) const {
  return chart_->eval(placement_.to_chart(x));
}

Mat32 PatchMap::jacobian(const RefPoint& x) const {
  return chart_->jacobian(placement_.to_chart(x)) * placement_.chart_linear();
}

Hessian PatchMap::hessian(const RefPoint& x) const {
  const Hessian Hc = chart_->hessian(placement_.to_chart(x));
  const Mat2 L = placement_.chart_linear();
  Hessian H;
  for (int k = 0; k < 2; ++k) {
    for (int l = k; l < 2; ++l) {
      Vec3 acc = Vec3::Zero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) acc += L(a, k) * L(b, l) * Hc(a, b);
      H.d[k + l] = acc;
    }
  }
  return H;
}

double PatchMap::distance_outside(const RefPoint& x) const {
  const Vec2 u = placement_.to_chart(x);
  const double dx = std::max({0.0, -u[0], u[0] - 1.0});
  const double dy = std::max({0.0, -u[1], u[1] - 1.0});
  return placement_.scale * std::hypot(dx, dy);
}

// ---------------------------------------------------------------- metric

MetricData metric_from_jacobian(const Mat32& jac) {
  Eigen::JacobiSVD<Mat32> svd(jac);
  const double smin = svd.singularValues()[1];
  if (!(smin >= kSingularThreshold)) {
    std::ostringstream msg;
    msg << "smallest singular value " << smin;
    throw Error(ErrorCode::singular_jacobian, msg.str());
  }
  MetricData m;
  m.jac = jac;
  m.G = jac.transpose() * jac;
  const double det = m.G(0, 0) * m.G(1, 1) - m.G(0, 1) * m.G(1, 0);
  m.Ginv << m.G(1, 1), -m.G(0, 1), -m.G(1, 0), m.G(0, 0);
  m.Ginv /= det;
  m.sqrt_detG = std::sqrt(det);
  return m;
}

MetricData metric_at(const PatchMap& map, const RefPoint& p) {
  return metric_from_jacobian(map.jacobian(p));
}

Vec2 surface_gradient_ref(const MetricData& metric, const Vec2& grad_ref) {
  return metric.Ginv * grad_ref;
}

double curve_measure(const MetricData& metric, const Vec2& tangent_ref) {
  if (tangent_ref.squaredNorm() == 0.0) throw Error(ErrorCode::zero_tangent, "curve_measure");
  return std::sqrt(tangent_ref.dot(metric.G * tangent_ref));
}

Vec2 metric_normal(const MetricData& metric, const Vec2& nu_ref) {
  const Vec2 m = metric.Ginv * nu_ref;
  return m / std::sqrt(m.dot(metric.G * m));
}

RefJet pullback(const PatchMap& map, const RefPoint& p, const Jet& u) {
  const Mat32 J = map.jacobian(p);
  const Hessian H = map.hessian(p);
  RefJet out;
  out.value = u.v;
  out.grad = J.transpose() * u.g;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      out.hess(k, l) = J.col(k).dot(u.H * J.col(l)) + u.g.dot(H(k, l));
  return out;
}

double laplace_beltrami_ref(const PatchMap& map, const RefPoint& p,
                            const std::function<RefJet(const RefPoint&)>& u_hat) {
  const MetricData m = metric_at(map, p);
  const Hessian H = map.hessian(p);
  const RefJet u = u_hat(p);

  std::array<Mat2, 2> dG;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        dG[a](k, l) = H(a, k).dot(m.jac.col(l)) + m.jac.col(k).dot(H(a, l));

  double lap = (m.Ginv.cwiseProduct(u.hess)).sum();
  const Vec2 grad = m.Ginv * u.grad;
  for (int a = 0; a < 2; ++a) {
    const Mat2 dGinv = -m.Ginv * dG[a] * m.Ginv;
    const double dlog = 0.5 * (m.Ginv * dG[a]).trace();
    lap += dGinv.row(a).dot(u.grad) + dlog * grad[a];
  }
  return lap;
}

// ---------------------------------------------------------------- inversion

RefPoint invert_map(const PatchMap& map, const AmbientPoint& target, const RefPoint& seed,
                    const InversionOptions& options) {
  RefPoint x = seed;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vec3 r = map.eval(x) - target;
    const Mat32 J = map.jacobian(x);
    const Vec2 Jr = J.transpose() * r;
    const Mat2 JtJ = J.transpose() * J;
    const Vec2 dx = JtJ.ldlt().solve(-Jr);
    x += dx;
    if (map.distance_outside(x) > options.domain_width) {
      std::ostringstream msg;
      msg << "iterate (" << x[0] << ", " << x[1] << ") left the extended domain";
      throw Error(ErrorCode::out_of_domain, msg.str());
    }
    if (dx.norm() < options.tolerance) {
      const Vec2 res = map.jacobian(x).transpose() * (map.eval(x) - target);
      if (res.norm() < options.tolerance) return x;
    }
  }
  throw Error(ErrorCode::non_convergence, "invert_map exceeded iteration limit");
}

RefPoint InterfaceMap::forward(const RefPoint& x_i, const RefPoint& seed_j) const {
  return invert_map(*map_j_, map_i_->eval(x_i), seed_j);
}

RefPoint InterfaceMap::backward(const RefPoint& x_j, const RefPoint& seed_i) const {
  return invert_map(*map_i_, map_j_->eval(x_j), seed_i);
}

}  // namespace cutpatch::geometry
