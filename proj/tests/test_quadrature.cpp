#include "cutpatch/assembly.hpp"
#include "cutpatch/quadrature.hpp"
#include "cutpatch/surface.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace cutpatch;
using namespace cutpatch::quadrature;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients of (p + t q)^m in t.
std::vector<double> linear_power(double p, double q, int m) {
  std::vector<double> c(m + 1);
  for (int k = 0; k <= m; ++k) c[k] = binomial(m, k) * std::pow(p, m - k) * std::pow(q, k);
  return c;
}

// Exact integral of x^a y^b over the region bounded by straight loops, from
// the Green identity  int x^a y^b dA = oint x^(a+1) y^b / (a+1) dy.
double green_monomial(const std::vector<trim::TrimLoop>& loops, int a, int b) {
  double sum = 0.0;
  for (const auto& loop : loops) {
    for (const auto& seg : loop.segments) {
      const Vec2 P = seg.start(), Q = seg.end();
      const auto cx = linear_power(P[0], Q[0] - P[0], a + 1);
      const auto cy = linear_power(P[1], Q[1] - P[1], b);
      double line = 0.0;
      for (std::size_t i = 0; i < cx.size(); ++i)
        for (std::size_t j = 0; j < cy.size(); ++j) line += cx[i] * cy[j] / double(i + j + 1);
      sum += line * (Q[1] - P[1]) / (a + 1);
    }
  }
  return sum;
}

double apply(const CutRule& rule, const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(rule.points[k]);
  return s;
}

// Random star-shaped polygon around c.
trim::TrimLoop star_polygon(std::mt19937_64& rng, const Vec2& c, double rmin, double rmax) {
  std::uniform_real_distribution<double> r(rmin, rmax), jitter(-0.3, 0.3);
  const int m = 5 + static_cast<int>(rng() % 6);
  std::vector<Vec2> v;
  for (int k = 0; k < m; ++k) {
    const double t = 2 * std::numbers::pi * (k + 0.5 + jitter(rng)) / m;
    v.push_back(c + r(rng) * Vec2(std::cos(t), std::sin(t)));
  }
  return trim::polygon(v);
}

}  // namespace

TEST_CASE("gauss rules") {
  const auto& g1 = gauss1d(1);
  CHECK(g1.points[0] == doctest::Approx(0.5));
  CHECK(g1.weights[0] == doctest::Approx(1.0));

  const auto& g2 = gauss1d(2);
  CHECK(g2.points[0] == doctest::Approx((3 - std::sqrt(3.0)) / 6).epsilon(1e-15));
  CHECK(g2.points[1] == doctest::Approx((3 + std::sqrt(3.0)) / 6).epsilon(1e-15));
  CHECK(g2.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g2.weights[1] == doctest::Approx(0.5).epsilon(1e-15));

  const auto& g5 = gauss1d(5);
  double x9 = 0.0;
  for (int i = 0; i < 5; ++i) x9 += g5.weights[i] * std::pow(g5.points[i], 9);
  CHECK(std::abs(x9 - 0.1) < 1e-14);

  for (int n = 1; n <= kMaxGaussPoints; ++n) {
    const auto& g = gauss1d(n);
    CHECK(g.degree == 2 * n - 1);
    double wsum = 0.0;
    for (double w : g.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 1.0) < 1e-13);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.points[i], k);
      CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-13);
    }
  }
  CHECK_THROWS_AS(gauss1d(0), Error);
  CHECK_THROWS_AS(gauss1d(kMaxGaussPoints + 1), Error);
}

TEST_CASE("cut rule point counts per boundary segment") {
  CHECK(cut_rule_counts(2, 1).per_segment() == 6);
  CHECK(cut_rule_counts(4, 1).per_segment() == 15);
  CHECK(cut_rule_counts(6, 1).per_segment() == 28);
  CHECK(cut_rule_counts(2, 2).per_segment() == 12);
  CHECK(cut_rule_counts(4, 2).per_segment() == 30);
  CHECK(cut_rule_counts(6, 2).per_segment() == 56);
  const trim::TrimLoop tri = trim::polygon({{0, 0}, {1, 0}, {0, 1}});
  CHECK(cut_cell_rule({tri}, 0.0, 4, 1).size() == 3 * 15);
}

TEST_CASE("full cell rule") {
  const double h = 0.125;
  const trim::Box box{Vec2(0.25, 0.5), h};
  const auto loop = trim::polygon({box.lo, box.lo + Vec2(h, 0), box.hi(), box.lo + Vec2(0, h)});
  const auto rule = cut_cell_rule({loop}, box.lo[1], 4, 1);
  CHECK(std::abs(rule.weight_sum() - h * h) < 1e-12 * h * h);
  // vertical edges carry zero weight, the bottom edge lies on x2 = a
  const auto pruned = prune_zero_weights(rule);
  CHECK(pruned.size() == 15);
  CHECK(std::abs(pruned.weight_sum() - h * h) < 1e-12 * h * h);
  const auto tensor = tensor_rule(box, 3);
  auto f = [](const Vec2& x) { return std::pow(x[0], 4) * std::pow(x[1], 3) + x[0] * x[1]; };
  CHECK(apply(rule, f) == doctest::Approx(apply(tensor, f)).epsilon(1e-13));
}

TEST_CASE("triangle monomial") {
  const auto rule = cut_cell_rule({trim::polygon({{0, 0}, {1, 0}, {0, 1}})}, 0.0, 4, 1);
  CHECK(std::abs(apply(rule, [](const Vec2& x) { return x[0] * x[0] * x[1] * x[1]; }) - 1.0 / 180) < 1e-13);
  CHECK(std::abs(rule.weight_sum() - 0.5) < 1e-14);
}

TEST_CASE("cut rules on random polygon cut cells against the Green oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 0.125;
  int tested = 0;
  double worst = 0.0, worst_area = 0.0;
  while (tested < 100) {
    const trim::Box cell{Vec2(3 * h, 5 * h), h};
    const Vec2 c = cell.lo + h * Vec2(u(rng), u(rng));
    const trim::RefSubdomain dom({star_polygon(rng, c, 0.3 * h, 1.2 * h)});
    const auto loops = trim::clip_to_cell(dom, cell);
    if (loops.empty()) continue;
    ++tested;
    const auto rule = cut_cell_rule(loops, cell.lo[1], 4, 1);
    std::array<double, 25> coef;
    for (double& v : coef) v = u(rng);
    double exact = 0.0, quad = 0.0;
    for (int a = 0; a <= 4; ++a) {
      for (int b = 0; b <= 4; ++b) {
        exact += coef[a * 5 + b] * green_monomial(loops, a, b);
        quad += coef[a * 5 + b] * apply(rule, [&](const Vec2& x) { return std::pow(x[0], a) * std::pow(x[1], b); });
      }
    }
    worst = std::max(worst, std::abs(quad - exact) / std::abs(exact));
    const double area = green_monomial(loops, 0, 0);
    worst_area = std::max(worst_area, std::abs(rule.weight_sum() - area) / area);
  }
  CHECK(worst < 1e-12);
  CHECK(worst_area < 1e-12);
}

TEST_CASE("cut rules of a cell and its complement add up to the cell") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 1);
  const trim::Box cell{Vec2(0.5, 0.25), 0.25};
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 c = cell.lo + cell.size * Vec2(u(rng), u(rng));
    const auto star = star_polygon(rng, c, 0.05, 0.2);
    const trim::RefSubdomain inside({star});
    const trim::RefSubdomain outside({trim::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), [&] {
                                       trim::TrimLoop hole;
                                       for (auto it = star.segments.rbegin(); it != star.segments.rend(); ++it)
                                         hole.segments.push_back(it->reversed());
                                       return hole;
                                     }()});
    const auto a = trim::clip_to_cell(inside, cell);
    const auto b = trim::clip_to_cell(outside, cell);
    std::array<double, 25> coef;
    for (double& v : coef) v = u(rng) - 0.5;
    auto f = [&](const Vec2& x) {
      double s = 0.0;
      for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j) s += coef[i * 5 + j] * std::pow(x[0], i) * std::pow(x[1], j);
      return s;
    };
    double sum = 0.0;
    if (!a.empty()) sum += apply(cut_cell_rule(a, cell.lo[1], 4, 1), f);
    if (!b.empty()) sum += apply(cut_cell_rule(b, cell.lo[1], 4, 1), f);
    const double full = apply(tensor_rule(cell, 3), f);
    CHECK(std::abs(sum - full) < 1e-12 * (1 + std::abs(full)));
  }
}

TEST_CASE("cut rules on curved boundaries") {
  // parabolic cap y <= 0.2 + 0.55 (1 - ((x - 0.5) / 0.4)^2)
  trim::TrimLoop loop{{trim::TrimSegment::line({0.1, 0.2}, {0.9, 0.2}),
                       trim::TrimSegment::quadratic({0.9, 0.2}, {0.5, 1.3}, {0.1, 0.2})}};
  const auto rule = cut_cell_rule({loop}, 0.0, 2, 2);
  CHECK(std::abs(rule.weight_sum() - 2.0 / 3.0 * 0.8 * 0.55) < 1e-13);
  // int x dA over a region symmetric about x = 1/2 is 1/2 of the area
  CHECK(std::abs(apply(rule, [](const Vec2& x) { return x[0]; }) - 0.5 * rule.weight_sum()) < 1e-13);
  CHECK_THROWS_AS(cut_cell_rule({loop}, 0.0, 2, 1), Error);
}

TEST_CASE("cut rules from the assembly match the mesh areas") {
  const auto surface = torus_surface({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  const assembly::Discretization d(surface, 8, 2);
  for (int p = 0; p < d.num_patches(); ++p) {
    const auto& cells = d.mesh(p).cells();
    for (std::size_t s = 0; s < cells.size(); ++s)
      CHECK(std::abs(d.rule(p, static_cast<int>(s)).weight_sum() - cells[s].area) < 1e-12 * d.h() * d.h());
  }
}

TEST_CASE("interface partition tiles each curve and measures the cube edge") {
  const auto surface = sphere_surface({0.3, 0.5, 0.9, 1.1, 0.2, 1.4});
  assembly::DiscretizationOptions opts;
  opts.interface_points = 8;
  const assembly::Discretization d(surface, 8, 1, opts);
  const double edge = std::acos(1.0 / 3.0);  // great-circle arc between adjacent cube corners
  for (std::size_t k = 0; k < surface.interfaces.size(); ++k) {
    const auto& ic = surface.interfaces[k];
    const auto& pieces = d.interface_pieces(static_cast<int>(k));
    std::vector<std::vector<std::pair<double, double>>> spans(ic.curve_i.size());
    double length = 0.0;
    for (const auto& piece : pieces) {
      spans[piece.curve_index].push_back({piece.s_begin, piece.s_end});
      CHECK(d.mesh(ic.patch_i).is_active(piece.owner_cell_i));
      CHECK(d.mesh(ic.patch_j).is_active(piece.owner_cell_j));
      for (const auto& cp : piece.points) {
        const auto m = geometry::metric_at(surface.patches[ic.patch_i].map, cp.x_i);
        length += cp.weight * geometry::curve_measure(m, cp.tangent_i);
        CHECK((surface.patches[ic.patch_i].map.eval(cp.x_i) - surface.patches[ic.patch_j].map.eval(cp.x_j)).norm() < 1e-10);
      }
    }
    for (auto& s : spans) {
      std::sort(s.begin(), s.end());
      REQUIRE_FALSE(s.empty());
      CHECK(std::abs(s.front().first) < 1e-10);
      CHECK(std::abs(s.back().second - 1.0) < 1e-10);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(std::abs(s[i].second - s[i + 1].first) < 1e-10);
    }

    // dense trapezoid oracle of the ambient arc length
    const auto& map = surface.patches[ic.patch_i].map;
    double trap = 0.0;
    for (const auto& seg : ic.curve_i) {
      const int m = 10000;
      Vec3 prev = map.eval(seg.eval(0.0));
      for (int i = 1; i <= m; ++i) {
        const Vec3 cur = map.eval(seg.eval(double(i) / m));
        trap += (cur - prev).norm();
        prev = cur;
      }
    }
    CHECK(std::abs(length - trap) < 1e-8);
    CHECK(std::abs(length - edge) < 1e-10);
  }
}

TEST_CASE("interface partition with nested meshes") {
  const auto surface = flat2_surface();
  REQUIRE(surface.interfaces.size() == 1);
  const auto& ic = surface.interfaces[0];
  const auto mi = mesh::build_active_mesh(surface.patches[ic.patch_i].domain, {4});
  const auto mj = mesh::build_active_mesh(surface.patches[ic.patch_j].domain, {8});
  const PatchView vi{&surface.patches[ic.patch_i].map, &surface.patches[ic.patch_i].domain, &mi};
  const PatchView vj{&surface.patches[ic.patch_j].map, &surface.patches[ic.patch_j].domain, &mj};
  const auto pieces = interface_partition(ic.curve_i, ic.curve_j, vi, vj, 3);

  // both maps are affine, so the side-j parameter runs backwards linearly
  REQUIRE(ic.curve_i.size() == 1);
  std::vector<double> breaks;
  for (double s : trim::intersect_with_gridlines(ic.curve_i[0], 4)) breaks.push_back(s);
  for (double s : trim::intersect_with_gridlines(ic.curve_j[0], 8)) breaks.push_back(1.0 - s);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> unique;
  for (double s : breaks) {
    if (s < 1e-10 || s > 1 - 1e-10) continue;
    if (unique.empty() || s - unique.back() > 1e-10) unique.push_back(s);
  }
  CHECK(pieces.size() == unique.size() + 1);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k)
    CHECK(std::abs(pieces[k].s_end - unique[k]) < 1e-10);
}

TEST_CASE("boundary partition of the flat square") {
  const auto surface = flat_surface();
  const assembly::Discretization d(surface, 8, 1);
  double perimeter = 0.0;
  for (std::size_t k = 0; k < surface.boundaries.size(); ++k)
    for (const auto& piece : d.boundary_pieces(static_cast<int>(k)))
      for (const auto& cp : piece.points) {
        const auto m = geometry::metric_at(surface.patches[0].map, cp.x_i);
        perimeter += cp.weight * geometry::curve_measure(m, cp.tangent_i);
        CHECK(std::abs(cp.nu_i.norm() - 1.0) < 1e-14);
        CHECK(std::abs(cp.nu_i.dot(cp.tangent_i)) < 1e-12 * cp.tangent_i.norm());
      }
  CHECK(perimeter == doctest::Approx(4.0).epsilon(1e-12));
}
