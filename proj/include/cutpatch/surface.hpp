#pragma once

// Multipatch surfaces: patch maps with their trimmed reference subdomains,
// interface curve pairs and boundary curves. Built-in closed surfaces and
// flat test geometries.

#include "cutpatch/geometry.hpp"
#include "cutpatch/trim.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cutpatch {

struct Patch {
  geometry::PatchMap map;
  trim::RefSubdomain domain;
};

/// Shared curve of patches i < j. Each side lists the curve in its own
/// counter-clockwise orientation.
struct InterfaceCurve {
  int patch_i = -1;
  int patch_j = -1;
  std::vector<trim::TrimSegment> curve_i;
  std::vector<trim::TrimSegment> curve_j;
};

enum class BoundaryKind { dirichlet, neumann };

struct BoundaryCurve {
  int patch = -1;
  std::vector<trim::TrimSegment> curve;
  BoundaryKind kind = BoundaryKind::dirichlet;
};

struct Surface {
  std::string name;
  std::vector<Patch> patches;
  std::vector<InterfaceCurve> interfaces;
  std::vector<BoundaryCurve> boundaries;

  bool closed() const { return boundaries.empty(); }
  /// Throws overlapping_boundary if two boundary curves share an arc.
  void validate() const;
};

/// Placement scale of the built-in surfaces (the rotated square fits in
/// [0,1]^2 for any angle).
inline constexpr double kPlacementScale = 0.7;

/// Kind of an unmatched chart edge. Edges are numbered 0..3 counter-clockwise
/// from the bottom edge of the chart square; `midpoint` is the ambient
/// midpoint of the edge.
using EdgeClassifier = std::function<BoundaryKind(int patch, int edge, const AmbientPoint& midpoint)>;

/// Surface made of placed chart squares. Edges whose ambient images
/// coincide become interfaces, the others boundary curves (kind from
/// `classify`, Dirichlet when empty).
Surface square_patch_surface(std::string name, std::vector<geometry::PatchMap> maps,
                             const EdgeClassifier& classify = {});

/// Placement with the built-in scale, rotated by `angle` about the centre.
geometry::Placement placed(double angle, const Vec2& shift = Vec2::Zero());

/// Unit sphere from the six cube faces. `angles` (size 6 or empty) rotate
/// the patches in the reference square.
Surface sphere_surface(const std::vector<double>& angles = {});

inline constexpr double kTorusMinor = 0.6;
inline constexpr double kTorusMajor = 1.0;
/// Torus with 4 x 2 windows in (phi, theta). `angles` has size 8 or is empty.
Surface torus_surface(const std::vector<double>& angles = {});

/// Unit square in the plane split at x = 1/2 into two patches with
/// slightly different placements; Dirichlet on the outer boundary.
Surface flat2_surface(const std::vector<double>& angles = {});

/// Single flat unit-square patch; Dirichlet on x = 0 and x = 1, Neumann on
/// y = 0 and y = 1.
Surface flat_surface(double angle = 0.0);

/// One cube face of the unit sphere (z > 0) with Dirichlet data on two
/// edges and Neumann data on the other two.
Surface cap_surface(double angle = 0.0);

}  // namespace cutpatch
