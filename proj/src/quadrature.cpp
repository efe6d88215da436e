#include "cutpatch/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace cutpatch::quadrature {

double CutRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

CutRuleCounts cut_rule_counts(int f_degree, int curve_degree) {
  if (f_degree < 0 || curve_degree < 1)
    throw Error(ErrorCode::invalid_input, "cut rule degrees out of range");
  return {gauss_points_for_degree(f_degree),
          gauss_points_for_degree(2 * f_degree * curve_degree + 2 * curve_degree - 1)};
}

CutRule cut_cell_rule(const std::vector<trim::TrimLoop>& boundary, double a, int f_degree,
                      int curve_degree) {
  const auto counts = cut_rule_counts(f_degree, curve_degree);
  const Gauss1D& inner = gauss1d(counts.inner);
  const Gauss1D& outer = gauss1d(counts.outer);
  CutRule rule;
  for (const auto& loop : boundary) {
    for (const auto& seg : loop.segments) {
      if (seg.degree > curve_degree)
        throw Error(ErrorCode::invalid_input, "segment degree exceeds the rule's curve degree");
      for (int i = 0; i < outer.size(); ++i) {
        const double s = outer.points[i];
        const Vec2 g = seg.eval(s);
        const double dg1 = seg.derivative(s)[0];
        const double wi = dg1 * (a - g[1]) * outer.weights[i];
        for (int j = 0; j < inner.size(); ++j) {
          rule.points.emplace_back(g[0], a + inner.points[j] * (g[1] - a));
          rule.weights.push_back(wi * inner.weights[j]);
        }
      }
    }
  }
  if (rule.weight_sum() < 0.0)
    throw Error(ErrorCode::orientation, "cut rule has negative total weight");
  return rule;
}

CutRule tensor_rule(const trim::Box& box, int n) {
  const Gauss1D& g = gauss1d(n);
  CutRule rule;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rule.points.emplace_back(box.lo[0] + box.size * g.points[i], box.lo[1] + box.size * g.points[j]);
      rule.weights.push_back(box.size * box.size * g.weights[i] * g.weights[j]);
    }
  }
  return rule;
}

CutRule prune_zero_weights(const CutRule& rule) {
  CutRule out;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    if (rule.weights[k] == 0.0) continue;
    out.points.push_back(rule.points[k]);
    out.weights.push_back(rule.weights[k]);
  }
  return out;
}

void write_rule_csv(std::ostream& out, int cell, const CutRule& rule) {
  for (std::size_t k = 0; k < rule.size(); ++k)
    out << cell << ',' << rule.points[k][0] << ',' << rule.points[k][1] << ',' << rule.weights[k] << '\n';
}

Vec2 outward_normal(const trim::TrimSegment& seg, double s) {
  const Vec2 d = seg.derivative(s);
  const double len = d.norm();
  if (len == 0.0) throw Error(ErrorCode::zero_tangent, "degenerate trim segment");
  return Vec2(d[1], -d[0]) / len;
}

namespace {

constexpr double kBreakTolerance = 1e-10;

struct CurveLocation {
  int index = 0;
  double s = 0.0;
  double distance = std::numeric_limits<double>::infinity();
};

CurveLocation locate_on_curve(const std::vector<trim::TrimSegment>& curve, const Vec2& x) {
  CurveLocation best;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    double s = 0.0;
    const double d = curve[k].distance(x, &s);
    if (d < best.distance) best = {static_cast<int>(k), s, d};
  }
  return best;
}

// Seed for inverting `map` at `target`: nearest sampled point of the curve.
RefPoint curve_seed(const std::vector<trim::TrimSegment>& curve, const geometry::PatchMap& map,
                    const AmbientPoint& target) {
  RefPoint best = curve.front().start();
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& seg : curve) {
    constexpr int kSamples = 32;
    for (int k = 0; k <= kSamples; ++k) {
      const RefPoint x = seg.eval(static_cast<double>(k) / kSamples);
      const double d = (map.eval(x) - target).squaredNorm();
      if (d < dist) {
        dist = d;
        best = x;
      }
    }
  }
  return best;
}

RefPoint map_across(const geometry::PatchMap& from, const geometry::PatchMap& to,
                    const std::vector<trim::TrimSegment>& to_curve, const RefPoint& x,
                    const RefPoint* seed) {
  const AmbientPoint X = from.eval(x);
  const RefPoint start = seed ? *seed : curve_seed(to_curve, to, X);
  try {
    return geometry::invert_map(to, X, start);
  } catch (const Error& e) {
    throw Error(ErrorCode::mapping_failure, std::string("interface inversion: ") + e.what());
  }
}

int owner_cell(const PatchView& side, const trim::TrimSegment& seg, double s, const RefPoint& x) {
  const auto& grid = side.mesh->grid();
  const Vec2 probe = x - 1e-6 * grid.h() * outward_normal(seg, s);
  if (side.domain && trim::contains(*side.domain, probe) != trim::Location::inside)
    throw Error(ErrorCode::orientation, "curve normal is not outward for its patch");
  const int id = grid.locate(probe);
  if (!side.mesh->is_active(id))
    throw Error(ErrorCode::invalid_input, "curve piece owned by an inactive cell");
  return id;
}

std::vector<std::vector<double>> grid_breaks(const std::vector<trim::TrimSegment>& curve, int n) {
  std::vector<std::vector<double>> breaks(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k) {
    breaks[k] = {0.0, 1.0};
    for (double s : trim::intersect_with_gridlines(curve[k], n)) breaks[k].push_back(s);
  }
  return breaks;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double s : v)
    if (out.empty() || s - out.back() > kBreakTolerance) out.push_back(s);
  // keep the exact end point
  if (!out.empty()) out.back() = std::max(out.back(), v.back());
  v = std::move(out);
}

}  // namespace

std::vector<InterfaceSegment> interface_partition(const std::vector<trim::TrimSegment>& curve_i,
                                                  const std::vector<trim::TrimSegment>& curve_j,
                                                  const PatchView& side_i, const PatchView& side_j,
                                                  int gauss_pts) {
  if (curve_i.empty() || curve_j.empty())
    throw Error(ErrorCode::invalid_input, "empty interface curve");
  const Gauss1D& g = gauss1d(gauss_pts);
  auto breaks = grid_breaks(curve_i, side_i.mesh->grid().n);

  // side-j grid crossings pulled back onto the side-i curve
  for (const auto& seg : curve_j) {
    for (double t : trim::intersect_with_gridlines(seg, side_j.mesh->grid().n)) {
      const RefPoint xi = map_across(*side_j.map, *side_i.map, curve_i, seg.eval(t), nullptr);
      const auto loc = locate_on_curve(curve_i, xi);
      if (loc.distance > 1e-8)
        throw Error(ErrorCode::mapping_failure, "mapped break point is off the interface curve");
      breaks[loc.index].push_back(loc.s);
    }
  }

  std::vector<InterfaceSegment> out;
  for (std::size_t k = 0; k < curve_i.size(); ++k) {
    auto& b = breaks[k];
    sort_unique(b);
    const auto& seg = curve_i[k];
    for (std::size_t m = 0; m + 1 < b.size(); ++m) {
      InterfaceSegment piece;
      piece.curve_index = static_cast<int>(k);
      piece.s_begin = b[m];
      piece.s_end = b[m + 1];
      const double len = piece.s_end - piece.s_begin;

      const RefPoint xa = seg.eval(piece.s_begin), xb = seg.eval(piece.s_end);
      const RefPoint ya = map_across(*side_i.map, *side_j.map, curve_j, xa, nullptr);
      const RefPoint yb = map_across(*side_i.map, *side_j.map, curve_j, xb, &ya);

      const double smid = 0.5 * (piece.s_begin + piece.s_end);
      const RefPoint xm = seg.eval(smid);
      const RefPoint seed_mid = 0.5 * (ya + yb);
      const RefPoint ym = map_across(*side_i.map, *side_j.map, curve_j, xm, &seed_mid);
      piece.owner_cell_i = owner_cell(side_i, seg, smid, xm);
      const auto loc_j = locate_on_curve(curve_j, ym);
      if (loc_j.distance > 1e-8)
        throw Error(ErrorCode::mapping_failure, "interface image is off the partner curve");
      piece.owner_cell_j = owner_cell(side_j, curve_j[loc_j.index], loc_j.s, ym);

      for (int q = 0; q < g.size(); ++q) {
        CurvePoint cp;
        cp.s = piece.s_begin + len * g.points[q];
        cp.weight = len * g.weights[q];
        cp.x_i = seg.eval(cp.s);
        cp.tangent_i = seg.derivative(cp.s);
        cp.nu_i = outward_normal(seg, cp.s);
        const RefPoint seed = ya + g.points[q] * (yb - ya);
        cp.x_j = map_across(*side_i.map, *side_j.map, curve_j, cp.x_i, &seed);
        const auto loc = locate_on_curve(curve_j, cp.x_j);
        if (loc.distance > 1e-8)
          throw Error(ErrorCode::mapping_failure, "interface image is off the partner curve");
        cp.nu_j = outward_normal(curve_j[loc.index], loc.s);
        piece.points.push_back(cp);
      }
      out.push_back(std::move(piece));
    }
  }
  return out;
}

std::vector<InterfaceSegment> boundary_partition(const std::vector<trim::TrimSegment>& curve,
                                                 const PatchView& side, int gauss_pts) {
  const Gauss1D& g = gauss1d(gauss_pts);
  auto breaks = grid_breaks(curve, side.mesh->grid().n);
  std::vector<InterfaceSegment> out;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    auto& b = breaks[k];
    sort_unique(b);
    const auto& seg = curve[k];
    for (std::size_t m = 0; m + 1 < b.size(); ++m) {
      InterfaceSegment piece;
      piece.curve_index = static_cast<int>(k);
      piece.s_begin = b[m];
      piece.s_end = b[m + 1];
      const double len = piece.s_end - piece.s_begin;
      const double smid = 0.5 * (piece.s_begin + piece.s_end);
      piece.owner_cell_i = owner_cell(side, seg, smid, seg.eval(smid));
      for (int q = 0; q < g.size(); ++q) {
        CurvePoint cp;
        cp.s = piece.s_begin + len * g.points[q];
        cp.weight = len * g.weights[q];
        cp.x_i = seg.eval(cp.s);
        cp.tangent_i = seg.derivative(cp.s);
        cp.nu_i = outward_normal(seg, cp.s);
        cp.x_j = cp.x_i;
        cp.nu_j = cp.nu_i;
        piece.points.push_back(cp);
      }
      out.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace cutpatch::quadrature
