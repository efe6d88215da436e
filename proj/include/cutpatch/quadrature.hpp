#pragma once

// Quadrature on cut cells (divergence-theorem construction), tensor rules
// on whole cells, and partitions of interface/boundary curves into pieces
// owned by a single cell on each side.

#include "cutpatch/gauss.hpp"
#include "cutpatch/geometry.hpp"
#include "cutpatch/mesh.hpp"
#include "cutpatch/trim.hpp"

#include <iosfwd>
#include <vector>

namespace cutpatch::quadrature {

struct CutRule {
  std::vector<RefPoint> points;
  std::vector<double> weights;  ///< signed

  std::size_t size() const { return points.size(); }
  double weight_sum() const;
};

/// Number of Gauss points of the inner (x2) and outer (curve parameter)
/// rules used for each boundary segment.
struct CutRuleCounts {
  int inner = 0;
  int outer = 0;
  int per_segment() const { return inner * outer; }
};
CutRuleCounts cut_rule_counts(int f_degree, int curve_degree);

/// Rule exact for tensor-product polynomials of degree <= f_degree on the
/// region bounded by the (counter-clockwise outer, clockwise hole) loops,
/// whose segments are polynomial of degree <= curve_degree. `a` is the
/// lower bound of the inner x2 integrals (the cell's minimum x2).
CutRule cut_cell_rule(const std::vector<trim::TrimLoop>& boundary, double a, int f_degree,
                      int curve_degree);

/// Tensor Gauss rule with n points per direction on a box.
CutRule tensor_rule(const trim::Box& box, int n);

/// Copy of the rule without zero weights.
CutRule prune_zero_weights(const CutRule& rule);

/// CSV dump "cell,x1,x2,w".
void write_rule_csv(std::ostream& out, int cell, const CutRule& rule);

/// Everything the curve quadrature needs to know about one side.
struct PatchView {
  const geometry::PatchMap* map = nullptr;
  const trim::RefSubdomain* domain = nullptr;
  const mesh::ActiveMesh* mesh = nullptr;
};

struct CurvePoint {
  double s = 0.0;
  double weight = 0.0;  ///< Gauss weight times parameter interval length
  RefPoint x_i;
  Vec2 tangent_i;  ///< d gamma_i / ds
  Vec2 nu_i;       ///< outward Euclidean unit normal on side i
  RefPoint x_j;    ///< image on the partner patch (interfaces only)
  Vec2 nu_j;       ///< outward Euclidean unit normal on side j
};

struct InterfaceSegment {
  int curve_index = 0;  ///< which TrimSegment of the side-i curve
  double s_begin = 0.0;
  double s_end = 1.0;
  int owner_cell_i = -1;
  int owner_cell_j = -1;  ///< -1 for boundary curves
  std::vector<CurvePoint> points;
};

/// Partition of the side-i interface curve at grid crossings of both
/// meshes (side-j crossings mapped back through F_i^{-1} F_j), with a
/// gauss_pts-point rule on each piece. curve_j is the same interface as
/// seen from patch j (its own counter-clockwise orientation).
std::vector<InterfaceSegment> interface_partition(const std::vector<trim::TrimSegment>& curve_i,
                                                  const std::vector<trim::TrimSegment>& curve_j,
                                                  const PatchView& side_i, const PatchView& side_j,
                                                  int gauss_pts);

/// Partition of a boundary curve of one patch at its grid crossings.
std::vector<InterfaceSegment> boundary_partition(const std::vector<trim::TrimSegment>& curve,
                                                 const PatchView& side, int gauss_pts);

/// Outward Euclidean unit normal (g2', -g1')/|g'| of a counter-clockwise curve.
Vec2 outward_normal(const trim::TrimSegment& seg, double s);

}  // namespace cutpatch::quadrature
