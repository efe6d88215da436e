#pragma once

// Second-order forward-mode differentiation over the three ambient
// coordinates. Exact solutions are written once as templates and evaluated
// with Jet to obtain value, gradient and hessian.

#include "cutpatch/common.hpp"

#include <cmath>

namespace cutpatch {

struct Jet {
  double v = 0.0;
  Vec3 g = Vec3::Zero();
  Mat3 H = Mat3::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit constants are the point
  Jet(double value, const Vec3& grad, const Mat3& hess) : v(value), g(grad), H(hess) {}

  static Jet variable(double value, int axis) {
    Jet j(value);
    j.g[axis] = 1.0;
    return j;
  }
};

// Chain rule for a scalar function with derivatives f0, f1, f2 at a.v.
inline Jet compose(const Jet& a, double f0, double f1, double f2) {
  return Jet(f0, f1 * a.g, f1 * a.H + f2 * a.g * a.g.transpose());
}

inline Jet operator+(const Jet& a, const Jet& b) { return Jet(a.v + b.v, a.g + b.g, a.H + b.H); }
inline Jet operator-(const Jet& a, const Jet& b) { return Jet(a.v - b.v, a.g - b.g, a.H - b.H); }
inline Jet operator-(const Jet& a) { return Jet(-a.v, -a.g, -a.H); }
inline Jet operator*(const Jet& a, const Jet& b) {
  return Jet(a.v * b.v, a.v * b.g + b.v * a.g,
             a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose());
}
inline Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet sin(const Jet& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet atan2(const Jet& y, const Jet& x) {
  // d atan2 = (x dy - y dx) / r2, second derivatives by the product rule.
  const double r2 = x.v * x.v + y.v * y.v;
  const double ax = -y.v / r2;
  const double ay = x.v / r2;
  Jet out(std::atan2(y.v, x.v));
  out.g = ax * x.g + ay * y.g;
  const Vec3 dax = (2.0 * y.v * (x.v * x.g + y.v * y.g) - r2 * y.g) / (r2 * r2);
  const Vec3 day = (r2 * x.g - 2.0 * x.v * (x.v * x.g + y.v * y.g)) / (r2 * r2);
  out.H = ax * x.H + ay * y.H + x.g * dax.transpose() + y.g * day.transpose();
  out.H = 0.5 * (out.H + out.H.transpose()).eval();
  return out;
}

inline double value_of(double a) { return a; }
inline double value_of(const Jet& a) { return a.v; }

}  // namespace cutpatch
