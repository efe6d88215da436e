#pragma once

// Patch maps from reference coordinates to the surface, the induced metric
// and the differential quantities needed for assembly in reference
// coordinates.

#include "cutpatch/common.hpp"
#include "cutpatch/jet.hpp"

#include <array>
#include <functional>
#include <memory>

namespace cutpatch::geometry {

/// Second derivatives of a map R^2 -> R^3, stored as d11, d12, d22.
/// Symmetric in the two reference indices by construction.
struct Hessian {
  std::array<Vec3, 3> d{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  const Vec3& operator()(int k, int l) const { return d[k + l]; }
};

/// Smooth map from chart coordinates u (the unit square, extended) to R^3.
class Chart {
 public:
  virtual ~Chart() = default;
  virtual Vec3 eval(const Vec2& u) const = 0;
  virtual Mat32 jacobian(const Vec2& u) const = 0;
  virtual Hessian hessian(const Vec2& u) const = 0;
};

/// Gnomonic projection of one face of the cube [-1,1]^3 onto the unit sphere.
/// The face is given by its outward axis and two in-face axes with
/// e1 x e2 = outward normal.
class CubeSphereChart final : public Chart {
 public:
  CubeSphereChart(const Vec3& normal, const Vec3& e1, const Vec3& e2);
  Vec3 eval(const Vec2& u) const override;
  Mat32 jacobian(const Vec2& u) const override;
  Hessian hessian(const Vec2& u) const override;

 private:
  Vec3 face_point(const Vec2& u) const;
  Vec3 n_, e1_, e2_;
};

/// Window [theta0, theta0 + dtheta] x [phi0, phi0 + dphi] of the torus
/// x = (R + r cos t) cos p, y = (R + r cos t) sin p, z = r sin t.
class TorusChart final : public Chart {
 public:
  TorusChart(double minor_radius, double major_radius, double theta0, double dtheta,
             double phi0, double dphi);
  Vec3 eval(const Vec2& u) const override;
  Mat32 jacobian(const Vec2& u) const override;
  Hessian hessian(const Vec2& u) const override;

  /// Toroidal coordinates (theta, phi) of a chart point.
  Vec2 angles(const Vec2& u) const;

 private:
  double r_, R_, t0_, dt_, p0_, dp_;
};

/// Affine map u -> (origin + scale * u, 0) onto the plane z = 0.
class FlatChart final : public Chart {
 public:
  FlatChart(const Vec2& origin = Vec2(0, 0), const Vec2& scale = Vec2(1, 1));
  Vec3 eval(const Vec2& u) const override;
  Mat32 jacobian(const Vec2& u) const override;
  Hessian hessian(const Vec2& u) const override;

 private:
  Vec2 origin_, scale_;
};

/// Similarity placement of the chart square inside the reference square:
/// x = center + scale * R(angle) (u - center) + shift.
struct Placement {
  double angle = 0.0;
  double scale = 1.0;
  Vec2 center = Vec2(0.5, 0.5);
  Vec2 shift = Vec2::Zero();

  RefPoint to_reference(const Vec2& u) const;
  Vec2 to_chart(const RefPoint& x) const;
  /// Linear part of to_chart.
  Mat2 chart_linear() const;
};

/// F_i = chart o placement^{-1}.
class PatchMap {
 public:
  PatchMap() = default;
  PatchMap(std::shared_ptr<const Chart> chart, Placement placement = {});

  AmbientPoint eval(const RefPoint& x) const;
  Mat32 jacobian(const RefPoint& x) const;
  Hessian hessian(const RefPoint& x) const;

  const Placement& placement() const { return placement_; }
  const Chart& chart() const { return *chart_; }
  std::shared_ptr<const Chart> chart_ptr() const { return chart_; }

  /// Distance (reference units) from x to the placed chart square; zero inside.
  double distance_outside(const RefPoint& x) const;

 private:
  std::shared_ptr<const Chart> chart_;
  Placement placement_;
};

/// Width of the extended domain U_delta around a reference subdomain.
inline constexpr double kExtendedWidth = 0.1;

struct MetricData {
  Mat2 G;
  Mat2 Ginv;
  double sqrt_detG = 0.0;
  Mat32 jac;
};

MetricData metric_from_jacobian(const Mat32& jac);
MetricData metric_at(const PatchMap& map, const RefPoint& p);

/// Coefficients of the surface gradient in the basis of jacobian columns.
Vec2 surface_gradient_ref(const MetricData& metric, const Vec2& grad_ref);

/// sqrt(t^T G t).
double curve_measure(const MetricData& metric, const Vec2& tangent_ref);

/// G^{-1} nu / |G^{-1} nu|_G: reference coordinates of the unit conormal.
Vec2 metric_normal(const MetricData& metric, const Vec2& nu_ref);

/// Value, reference gradient and reference hessian of a pulled-back function.
struct RefJet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// Pullback u o F of an ambient function given through its jet.
RefJet pullback(const PatchMap& map, const RefPoint& p, const Jet& ambient);

/// Laplace-Beltrami of u_hat in reference coordinates,
/// |G|^{-1/2} div(|G|^{1/2} G^{-1} grad u_hat), using the exact map hessian.
double laplace_beltrami_ref(const PatchMap& map, const RefPoint& p,
                            const std::function<RefJet(const RefPoint&)>& u_hat);

struct InversionOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  double domain_width = kExtendedWidth;
};

/// Gauss-Newton inversion of F: argmin_x |F(x) - target|.
RefPoint invert_map(const PatchMap& map, const AmbientPoint& target, const RefPoint& seed,
                    const InversionOptions& options = {});

/// p_ij = F_j^{-1} o F_i restricted to the interface.
class InterfaceMap {
 public:
  InterfaceMap(const PatchMap& map_i, const PatchMap& map_j) : map_i_(&map_i), map_j_(&map_j) {}

  RefPoint forward(const RefPoint& x_i, const RefPoint& seed_j) const;
  RefPoint backward(const RefPoint& x_j, const RefPoint& seed_i) const;

 private:
  const PatchMap* map_i_;
  const PatchMap* map_j_;
};

}  // namespace cutpatch::geometry
