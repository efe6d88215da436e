#include "cutpatch/surface.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace cutpatch {

namespace {

constexpr double kMatchTolerance = 1e-9;

const std::array<Vec2, 4> kCorners{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

struct Edge {
  int patch;
  int index;
  AmbientPoint a, b, mid;
};

bool same_point(const AmbientPoint& x, const AmbientPoint& y) {
  return (x - y).norm() < kMatchTolerance;
}

bool same_edge(const Edge& e, const Edge& f) {
  if (!same_point(e.mid, f.mid)) return false;
  return (same_point(e.a, f.b) && same_point(e.b, f.a)) || (same_point(e.a, f.a) && same_point(e.b, f.b));
}

trim::TrimSegment edge_segment(const geometry::Placement& pl, int e) {
  return trim::TrimSegment::line(pl.to_reference(kCorners[e]), pl.to_reference(kCorners[(e + 1) % 4]));
}

bool overlaps(const std::vector<trim::TrimSegment>& a, const std::vector<trim::TrimSegment>& b) {
  for (const auto& seg : a) {
    for (int k = 1; k < 8; ++k) {
      const Vec2 x = seg.eval(k / 8.0);
      for (const auto& other : b)
        if (other.distance(x) < trim::kBoundaryTolerance) return true;
    }
  }
  return false;
}

std::vector<double> angles_or_zero(const std::vector<double>& angles, std::size_t n) {
  if (angles.empty()) return std::vector<double>(n, 0.0);
  if (angles.size() != n)
    throw Error(ErrorCode::invalid_input, "expected " + std::to_string(n) + " patch angles");
  return angles;
}

}  // namespace

void Surface::validate() const {
  for (std::size_t a = 0; a < boundaries.size(); ++a)
    for (std::size_t b = a + 1; b < boundaries.size(); ++b)
      if (boundaries[a].patch == boundaries[b].patch && overlaps(boundaries[a].curve, boundaries[b].curve))
        throw Error(ErrorCode::overlapping_boundary, "boundary curves overlap on patch " +
                                                         std::to_string(boundaries[a].patch));
}

geometry::Placement placed(double angle, const Vec2& shift) {
  geometry::Placement pl;
  pl.angle = angle;
  pl.scale = kPlacementScale;
  pl.shift = shift;
  for (const auto& c : kCorners) {
    const RefPoint x = pl.to_reference(c);
    if (x.minCoeff() < 0.0 || x.maxCoeff() > 1.0)
      throw Error(ErrorCode::invalid_input, "placed patch leaves the reference square");
  }
  return pl;
}

Surface square_patch_surface(std::string name, std::vector<geometry::PatchMap> maps,
                             const EdgeClassifier& classify) {
  Surface s;
  s.name = std::move(name);
  std::vector<Edge> edges;
  for (std::size_t p = 0; p < maps.size(); ++p) {
    const auto& pl = maps[p].placement();
    std::vector<Vec2> corners;
    for (const auto& c : kCorners) corners.push_back(pl.to_reference(c));
    s.patches.push_back({maps[p], trim::RefSubdomain({trim::polygon(corners)})});
    const auto& chart = maps[p].chart();
    for (int e = 0; e < 4; ++e) {
      const Vec2 u0 = kCorners[e], u1 = kCorners[(e + 1) % 4];
      edges.push_back({static_cast<int>(p), e, chart.eval(u0), chart.eval(u1), chart.eval(0.5 * (u0 + u1))});
    }
  }

  std::vector<bool> used(edges.size(), false);
  for (std::size_t a = 0; a < edges.size(); ++a) {
    if (used[a]) continue;
    for (std::size_t b = a + 1; b < edges.size(); ++b) {
      if (used[b] || edges[b].patch == edges[a].patch || !same_edge(edges[a], edges[b])) continue;
      used[a] = used[b] = true;
      const Edge& ei = edges[a];
      const Edge& ej = edges[b];
      s.interfaces.push_back({ei.patch, ej.patch, {edge_segment(maps[ei.patch].placement(), ei.index)},
                              {edge_segment(maps[ej.patch].placement(), ej.index)}});
      break;
    }
    if (!used[a]) {
      const Edge& e = edges[a];
      const BoundaryKind kind = classify ? classify(e.patch, e.index, e.mid) : BoundaryKind::dirichlet;
      s.boundaries.push_back({e.patch, {edge_segment(maps[e.patch].placement(), e.index)}, kind});
    }
  }
  s.validate();
  return s;
}

Surface sphere_surface(const std::vector<double>& angles) {
  const auto a = angles_or_zero(angles, 6);
  const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
  // e1 x e2 = outward face normal on every face
  const std::array<std::array<Vec3, 3>, 6> faces{{{X, Y, Z}, {-X, Z, Y}, {Y, Z, X},
                                                  {-Y, X, Z}, {Z, X, Y}, {-Z, Y, X}}};
  std::vector<geometry::PatchMap> maps;
  for (int f = 0; f < 6; ++f)
    maps.emplace_back(std::make_shared<geometry::CubeSphereChart>(faces[f][0], faces[f][1], faces[f][2]),
                      placed(a[f]));
  auto s = square_patch_surface("sphere", std::move(maps));
  if (!s.closed()) throw Error(ErrorCode::invalid_input, "sphere patches do not close up");
  return s;
}

Surface torus_surface(const std::vector<double>& angles) {
  const auto a = angles_or_zero(angles, 8);
  constexpr double pi = std::numbers::pi;
  std::vector<geometry::PatchMap> maps;
  for (int t = 0; t < 2; ++t)
    for (int q = 0; q < 4; ++q)
      maps.emplace_back(std::make_shared<geometry::TorusChart>(kTorusMinor, kTorusMajor, t * pi, pi,
                                                               q * pi / 2, pi / 2),
                        placed(a[t * 4 + q]));
  auto s = square_patch_surface("torus", std::move(maps));
  if (!s.closed()) throw Error(ErrorCode::invalid_input, "torus patches do not close up");
  return s;
}

Surface flat2_surface(const std::vector<double>& angles) {
  const auto a = angles_or_zero(angles, 2);
  std::vector<geometry::PatchMap> maps;
  maps.emplace_back(std::make_shared<geometry::FlatChart>(Vec2(0.0, 0.0), Vec2(0.5, 1.0)),
                    placed(a[0], Vec2(0.0031, 0.0047)));
  maps.emplace_back(std::make_shared<geometry::FlatChart>(Vec2(0.5, 0.0), Vec2(0.5, 1.0)),
                    placed(a[1], Vec2(-0.0043, 0.0029)));
  return square_patch_surface("flat2", std::move(maps));
}

Surface flat_surface(double angle) {
  std::vector<geometry::PatchMap> maps;
  maps.emplace_back(std::make_shared<geometry::FlatChart>(), placed(angle, Vec2(0.0023, -0.0037)));
  return square_patch_surface("flat", std::move(maps), [](int, int edge, const AmbientPoint&) {
    return edge % 2 == 1 ? BoundaryKind::dirichlet : BoundaryKind::neumann;
  });
}

Surface cap_surface(double angle) {
  std::vector<geometry::PatchMap> maps;
  maps.emplace_back(std::make_shared<geometry::CubeSphereChart>(Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY()),
                    placed(angle));
  return square_patch_surface("cap", std::move(maps), [](int, int edge, const AmbientPoint&) {
    return edge < 2 ? BoundaryKind::dirichlet : BoundaryKind::neumann;
  });
}

}  // namespace cutpatch
