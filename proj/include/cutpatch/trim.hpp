#pragma once

// Trim curves bounding reference subdomains, point classification, and
// clipping of a subdomain against background-grid cells.

#include "cutpatch/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace cutpatch::trim {

/// Polynomial curve of degree 1 or 2 on s in [0,1] in Bernstein form.
struct TrimSegment {
  int degree = 1;
  std::array<Vec2, 3> ctrl{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};

  static TrimSegment line(const Vec2& a, const Vec2& b);
  static TrimSegment quadratic(const Vec2& a, const Vec2& control, const Vec2& b);

  Vec2 eval(double s) const;
  Vec2 derivative(double s) const;
  const Vec2& start() const { return ctrl[0]; }
  const Vec2& end() const { return ctrl[degree]; }

  /// Restriction to [a,b] reparametrized to [0,1].
  TrimSegment sub(double a, double b) const;
  TrimSegment reversed() const;

  /// Monomial coefficients c0 + c1 s + c2 s^2 of one component.
  std::array<double, 3> monomial(int component) const;

  /// Euclidean distance from p, and the closest parameter.
  double distance(const Vec2& p, double* closest_s = nullptr) const;

  bool is_straight() const;
};

/// Closed chain of segments.
struct TrimLoop {
  std::vector<TrimSegment> segments;

  /// Exact signed area enclosed (positive for counter-clockwise).
  double signed_area() const;
  /// Max distance between consecutive segment end/start points.
  double closure_gap() const;
};

/// Reference subdomain bounded by an outer counter-clockwise loop and
/// clockwise hole loops.
class RefSubdomain {
 public:
  RefSubdomain() = default;
  /// Validates orientation, closure, regularity and loop separation.
  explicit RefSubdomain(std::vector<TrimLoop> loops);

  const std::vector<TrimLoop>& loops() const { return loops_; }
  double area() const;

 private:
  std::vector<TrimLoop> loops_;
};

/// Axis-aligned reference box [lo, lo + size]^2.
struct Box {
  Vec2 lo = Vec2::Zero();
  double size = 1.0;
  Vec2 hi() const { return lo + Vec2(size, size); }
};

enum class Location { inside, outside, boundary };

inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr double kSnapTolerance = 1e-12;
inline constexpr double kSliverFraction = 1e-12;

/// Winding-number classification; "boundary" within 1e-10 of a segment.
Location contains(const RefSubdomain& dom, const Vec2& p);
/// Winding number of the loops around p (no boundary test).
int winding_number(const std::vector<TrimLoop>& loops, const Vec2& p);

/// Oriented boundary loops of dom intersected with the cell. A fully inside
/// cell yields its own boundary as four straight segments; an empty or
/// degenerate (area < 1e-12 size^2) intersection yields an empty list.
std::vector<TrimLoop> clip_to_cell(const RefSubdomain& dom, const Box& cell);
/// Same, for an arbitrary set of loops.
std::vector<TrimLoop> clip_loops(const std::vector<TrimLoop>& loops, const Box& cell);

/// Signed area of a set of loops.
double signed_area(const std::vector<TrimLoop>& loops);

/// Parameters where the curve crosses a line x_axis = value (sorted, in [0,1]).
std::vector<double> intersect_with_line(const TrimSegment& curve, int axis, double value);

/// Parameters in [0,1] where the curve crosses a line of the uniform grid
/// with n cells per side (sorted, deduplicated to 1e-12).
std::vector<double> intersect_with_gridlines(const TrimSegment& curve, int n);

/// Closed loop through the given vertices with straight segments.
TrimLoop polygon(const std::vector<Vec2>& vertices);

/// Loop file: one segment per line "degree x0 y0 x1 y1 [x2 y2]" with
/// Bernstein control points; a line "loop" (or a blank line) starts a new
/// loop; '#' starts a comment.
std::vector<TrimLoop> read_loops(std::istream& in);
std::vector<TrimLoop> load_loops(const std::string& path);
void write_loops(std::ostream& out, const std::vector<TrimLoop>& loops);

}  // namespace cutpatch::trim
