#include "cutpatch/trim.hpp"

#include "cutpatch/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cutpatch::trim {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Real roots of c0 + c1 s + c2 s^2 in [0,1], sorted. A near-zero
// discriminant is treated as a double root (tangential contact).
std::vector<double> roots_in_unit(double c0, double c1, double c2) {
  std::vector<double> out;
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), 1e-300});
  auto accept = [&](double s) {
    if (s >= -kSnapTolerance && s <= 1.0 + kSnapTolerance) out.push_back(std::clamp(s, 0.0, 1.0));
  };
  if (std::abs(c2) <= 1e-14 * scale) {
    if (std::abs(c1) > 1e-14 * scale) accept(-c0 / c1);
  } else {
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0 && disc > -1e-14 * scale * scale) disc = 0.0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (c1 + std::copysign(sq, c1));
      if (q != 0.0) {
        accept(q / c2);
        accept(c0 / q);
      } else {
        accept(0.0);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= kSnapTolerance; }),
            out.end());
  return out;
}

// Parameter where a monotone piece of component `axis` reaches `value`.
double bisect_monotone(const TrimSegment& seg, int axis, double value, double s0, double s1) {
  const bool increasing = seg.eval(s1)[axis] > seg.eval(s0)[axis];
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (s0 + s1);
    const double f = seg.eval(mid)[axis];
    if ((f < value) == increasing) s0 = mid; else s1 = mid;
  }
  return 0.5 * (s0 + s1);
}

}  // namespace

// ---------------------------------------------------------------- segment

TrimSegment TrimSegment::line(const Vec2& a, const Vec2& b) {
  TrimSegment s;
  s.degree = 1;
  s.ctrl = {a, b, Vec2::Zero()};
  return s;
}

TrimSegment TrimSegment::quadratic(const Vec2& a, const Vec2& control, const Vec2& b) {
  TrimSegment s;
  s.degree = 2;
  s.ctrl = {a, control, b};
  return s;
}

Vec2 TrimSegment::eval(double s) const {
  const double t = 1.0 - s;
  if (degree == 1) return t * ctrl[0] + s * ctrl[1];
  return t * t * ctrl[0] + 2.0 * s * t * ctrl[1] + s * s * ctrl[2];
}

Vec2 TrimSegment::derivative(double s) const {
  if (degree == 1) return ctrl[1] - ctrl[0];
  return 2.0 * (1.0 - s) * (ctrl[1] - ctrl[0]) + 2.0 * s * (ctrl[2] - ctrl[1]);
}

TrimSegment TrimSegment::sub(double a, double b) const {
  if (degree == 1) return line(eval(a), eval(b));
  auto blossom = [&](double t1, double t2) {
    return (1 - t1) * (1 - t2) * ctrl[0] + ((1 - t1) * t2 + t1 * (1 - t2)) * ctrl[1] +
           t1 * t2 * ctrl[2];
  };
  return quadratic(blossom(a, a), blossom(a, b), blossom(b, b));
}

TrimSegment TrimSegment::reversed() const {
  if (degree == 1) return line(ctrl[1], ctrl[0]);
  return quadratic(ctrl[2], ctrl[1], ctrl[0]);
}

std::array<double, 3> TrimSegment::monomial(int c) const {
  if (degree == 1) return {ctrl[0][c], ctrl[1][c] - ctrl[0][c], 0.0};
  return {ctrl[0][c], 2.0 * (ctrl[1][c] - ctrl[0][c]), ctrl[0][c] - 2.0 * ctrl[1][c] + ctrl[2][c]};
}

double TrimSegment::distance(const Vec2& p, double* closest_s) const {
  double best_s = 0.0;
  if (degree == 1) {
    const Vec2 d = ctrl[1] - ctrl[0];
    const double len2 = d.squaredNorm();
    best_s = len2 > 0.0 ? std::clamp((p - ctrl[0]).dot(d) / len2, 0.0, 1.0) : 0.0;
  } else {
    double best = std::numeric_limits<double>::infinity();
    constexpr int kSamples = 16;
    for (int i = 0; i <= kSamples; ++i) {
      const double s = static_cast<double>(i) / kSamples;
      const double d = (eval(s) - p).squaredNorm();
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    const Vec2 dd = 2.0 * (ctrl[2] - 2.0 * ctrl[1] + ctrl[0]);
    for (int it = 0; it < 30; ++it) {
      const Vec2 r = eval(best_s) - p;
      const Vec2 d1 = derivative(best_s);
      const double g = r.dot(d1);
      const double h = d1.squaredNorm() + r.dot(dd);
      if (h <= 0.0) break;
      const double next = std::clamp(best_s - g / h, 0.0, 1.0);
      if (std::abs(next - best_s) < 1e-15) break;
      best_s = next;
    }
  }
  if (closest_s) *closest_s = best_s;
  return (eval(best_s) - p).norm();
}

bool TrimSegment::is_straight() const {
  if (degree == 1) return true;
  const Vec2 d = ctrl[2] - ctrl[0];
  const double len = d.norm();
  return std::abs(cross(d, ctrl[1] - ctrl[0])) <= 1e-14 * std::max(len * len, 1e-300);
}

// ---------------------------------------------------------------- loops

double TrimLoop::signed_area() const {
  // Green: A = 1/2 int (x y' - y x') ds, integrand of degree <= 3.
  const auto& g = quadrature::gauss1d(2);
  double area = 0.0;
  for (const auto& seg : segments) {
    for (int q = 0; q < g.size(); ++q) {
      const Vec2 p = seg.eval(g.points[q]);
      const Vec2 d = seg.derivative(g.points[q]);
      area += 0.5 * g.weights[q] * cross(p, d);
    }
  }
  return area;
}

double TrimLoop::closure_gap() const {
  double gap = 0.0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& next = segments[(k + 1) % segments.size()];
    gap = std::max(gap, (segments[k].end() - next.start()).norm());
  }
  return gap;
}

double signed_area(const std::vector<TrimLoop>& loops) {
  double a = 0.0;
  for (const auto& l : loops) a += l.signed_area();
  return a;
}

TrimLoop polygon(const std::vector<Vec2>& vertices) {
  TrimLoop loop;
  for (std::size_t k = 0; k < vertices.size(); ++k)
    loop.segments.push_back(TrimSegment::line(vertices[k], vertices[(k + 1) % vertices.size()]));
  return loop;
}

RefSubdomain::RefSubdomain(std::vector<TrimLoop> loops) : loops_(std::move(loops)) {
  if (loops_.empty()) throw Error(ErrorCode::invalid_input, "subdomain without loops");
  for (std::size_t l = 0; l < loops_.size(); ++l) {
    const auto& loop = loops_[l];
    if (loop.segments.empty()) throw Error(ErrorCode::invalid_input, "empty trim loop");
    if (loop.closure_gap() > 1e-12)
      throw Error(ErrorCode::invalid_input, "trim loop " + std::to_string(l) + " is not closed");
    for (const auto& seg : loop.segments) {
      if (seg.degree != 1 && seg.degree != 2)
        throw Error(ErrorCode::invalid_input, "trim segments must have degree 1 or 2");
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        if (seg.derivative(s).norm() <= 0.0)
          throw Error(ErrorCode::invalid_input, "irregular trim segment");
    }
    const double area = loop.signed_area();
    if (l == 0 && !(area > 0.0))
      throw Error(ErrorCode::orientation, "outer loop must be counter-clockwise");
    if (l > 0 && !(area < 0.0))
      throw Error(ErrorCode::orientation, "hole loops must be clockwise");
  }
  for (std::size_t a = 0; a < loops_.size(); ++a) {
    for (std::size_t b = a + 1; b < loops_.size(); ++b) {
      for (const auto& sa : loops_[a].segments) {
        for (int k = 0; k <= 8; ++k) {
          const Vec2 p = sa.eval(k / 8.0);
          for (const auto& sb : loops_[b].segments)
            if (sb.distance(p) <= 1e-10)
              throw Error(ErrorCode::invalid_input, "trim loops intersect");
        }
      }
    }
  }
  for (std::size_t h = 1; h < loops_.size(); ++h) {
    if (winding_number({loops_[0]}, loops_[h].segments.front().start()) != 1)
      throw Error(ErrorCode::invalid_input, "hole loop outside the outer loop");
  }
}

double RefSubdomain::area() const { return signed_area(loops_); }

// ---------------------------------------------------------------- classification

int winding_number(const std::vector<TrimLoop>& loops, const Vec2& p) {
  int w = 0;
  for (const auto& loop : loops) {
    for (const auto& seg : loop.segments) {
      // split into y-monotone pieces
      std::vector<double> cuts{0.0};
      if (seg.degree == 2) {
        const auto m = seg.monomial(1);
        if (m[2] != 0.0) {
          const double s = -m[1] / (2.0 * m[2]);
          if (s > 0.0 && s < 1.0) cuts.push_back(s);
        }
      }
      cuts.push_back(1.0);
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double s0 = cuts[k], s1 = cuts[k + 1];
        const Vec2 a = seg.eval(s0), b = seg.eval(s1);
        int dir = 0;
        if (a[1] <= p[1] && p[1] < b[1]) dir = 1;
        else if (b[1] <= p[1] && p[1] < a[1]) dir = -1;
        if (dir == 0) continue;
        const double s = seg.degree == 1 ? s0 + (s1 - s0) * (p[1] - a[1]) / (b[1] - a[1])
                                         : bisect_monotone(seg, 1, p[1], s0, s1);
        if (seg.eval(s)[0] > p[0]) w += dir;
      }
    }
  }
  return w;
}

Location contains(const RefSubdomain& dom, const Vec2& p) {
  for (const auto& loop : dom.loops())
    for (const auto& seg : loop.segments)
      if (seg.distance(p) < kBoundaryTolerance) return Location::boundary;
  return winding_number(dom.loops(), p) != 0 ? Location::inside : Location::outside;
}

// ---------------------------------------------------------------- intersections

std::vector<double> intersect_with_line(const TrimSegment& curve, int axis, double value) {
  const auto m = curve.monomial(axis);
  return roots_in_unit(m[0] - value, m[1], m[2]);
}

std::vector<double> intersect_with_gridlines(const TrimSegment& curve, int n) {
  std::vector<double> out;
  for (int axis = 0; axis < 2; ++axis) {
    double lo = curve.ctrl[0][axis], hi = lo;
    for (int k = 1; k <= curve.degree; ++k) {
      lo = std::min(lo, curve.ctrl[k][axis]);
      hi = std::max(hi, curve.ctrl[k][axis]);
    }
    const int kmin = static_cast<int>(std::floor(lo * n - 1e-9));
    const int kmax = static_cast<int>(std::ceil(hi * n + 1e-9));
    for (int k = kmin; k <= kmax; ++k) {
      for (double s : intersect_with_line(curve, axis, static_cast<double>(k) / n)) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= kSnapTolerance; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------- clipping

namespace {

using Chain = std::vector<TrimSegment>;

void snap_point(Vec2& p, int axis, double value) {
  if (std::abs(p[axis] - value) <= kSnapTolerance) p[axis] = value;
}

// Keeps the part of a closed chain in {x_axis <= value} (keep_below) or
// {x_axis >= value}. Outside runs are replaced by straight pieces along
// the clip line, which preserves the winding function inside the
// half-plane.
Chain clip_halfplane(const Chain& chain, int axis, double value, bool keep_below) {
  Chain pieces;
  for (TrimSegment seg : chain) {
    snap_point(seg.ctrl[0], axis, value);
    snap_point(seg.ctrl[seg.degree], axis, value);
    std::vector<double> cuts{0.0};
    for (double s : intersect_with_line(seg, axis, value))
      if (s > kSnapTolerance && s < 1.0 - kSnapTolerance) cuts.push_back(s);
    cuts.push_back(1.0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      TrimSegment piece = cuts.size() == 2 ? seg : seg.sub(cuts[k], cuts[k + 1]);
      if (k > 0) piece.ctrl[0][axis] = value;
      if (k + 2 < cuts.size()) piece.ctrl[piece.degree][axis] = value;
      pieces.push_back(piece);
    }
  }
  const std::size_t m = pieces.size();
  std::vector<char> inside(m);
  bool any_in = false, any_out = false;
  for (std::size_t k = 0; k < m; ++k) {
    const double c = pieces[k].eval(0.5)[axis];
    inside[k] = keep_below ? c <= value + kSnapTolerance : c >= value - kSnapTolerance;
    any_in = any_in || inside[k];
    any_out = any_out || !inside[k];
  }
  if (!any_in) return {};
  if (!any_out) return pieces;

  std::size_t start = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (inside[k] && !inside[(k + m - 1) % m]) {
      start = k;
      break;
    }
  }
  Chain out;
  bool pending = false;  // an outside run has been skipped since the last kept piece
  for (std::size_t step = 0; step < m; ++step) {
    const std::size_t k = (start + step) % m;
    if (!inside[k]) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) {
      Vec2 a = out.back().end(), b = pieces[k].start();
      a[axis] = value;
      b[axis] = value;
      out.back().ctrl[out.back().degree] = a;
      pieces[k].ctrl[0] = b;
      if ((a - b).norm() > 0.0) out.push_back(TrimSegment::line(a, b));
    }
    pending = false;
    out.push_back(pieces[k]);
  }
  // close: the run before `start` was outside by construction
  Vec2 a = out.back().end(), b = out.front().start();
  a[axis] = value;
  b[axis] = value;
  out.back().ctrl[out.back().degree] = a;
  out.front().ctrl[0] = b;
  if ((a - b).norm() > 0.0) out.push_back(TrimSegment::line(a, b));
  return out;
}

// Drops zero-length pieces and merges consecutive collinear straight pieces
// (line integrals along a line are additive in the oriented sense).
Chain simplify(Chain chain, double size) {
  const double tiny = 1e-14 * size;
  auto straight_and_collinear = [&](const TrimSegment& a, const TrimSegment& b) {
    if (!a.is_straight() || !b.is_straight()) return false;
    const Vec2 da = a.end() - a.start();
    const Vec2 db = b.end() - b.start();
    return std::abs(cross(da, db)) <= 1e-12 * da.norm() * db.norm();
  };
  bool changed = true;
  while (changed && !chain.empty()) {
    changed = false;
    Chain next;
    for (const auto& seg : chain) {
      if ((seg.end() - seg.start()).norm() <= tiny && seg.is_straight()) {
        changed = true;
        if (!next.empty()) next.back().ctrl[next.back().degree] = seg.end();
        continue;
      }
      if (!next.empty() && straight_and_collinear(next.back(), seg)) {
        next.back() = TrimSegment::line(next.back().start(), seg.end());
        changed = true;
        continue;
      }
      next.push_back(seg);
    }
    if (next.size() >= 2 && straight_and_collinear(next.back(), next.front())) {
      next.front() = TrimSegment::line(next.back().start(), next.front().end());
      next.pop_back();
      changed = true;
    }
    chain = std::move(next);
  }
  return chain;
}

}  // namespace

std::vector<TrimLoop> clip_loops(const std::vector<TrimLoop>& loops, const Box& cell) {
  std::vector<TrimLoop> out;
  const Vec2 lo = cell.lo, hi = cell.hi();
  for (const auto& loop : loops) {
    Chain chain = loop.segments;
    chain = clip_halfplane(chain, 0, lo[0], false);
    if (!chain.empty()) chain = clip_halfplane(chain, 0, hi[0], true);
    if (!chain.empty()) chain = clip_halfplane(chain, 1, lo[1], false);
    if (!chain.empty()) chain = clip_halfplane(chain, 1, hi[1], true);
    if (chain.empty()) continue;
    chain = simplify(std::move(chain), cell.size);
    if (chain.size() < 2) continue;
    TrimLoop clipped{std::move(chain)};
    if (std::abs(clipped.signed_area()) <= kSliverFraction * cell.size * cell.size) continue;
    out.push_back(std::move(clipped));
  }
  if (std::abs(signed_area(out)) <= kSliverFraction * cell.size * cell.size) out.clear();
  return out;
}

std::vector<TrimLoop> clip_to_cell(const RefSubdomain& dom, const Box& cell) {
  return clip_loops(dom.loops(), cell);
}

// ---------------------------------------------------------------- io

std::vector<TrimLoop> read_loops(std::istream& in) {
  std::vector<TrimLoop> loops;
  TrimLoop current;
  auto flush = [&] {
    if (!current.segments.empty()) loops.push_back(std::move(current));
    current = {};
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) {
      flush();
      continue;
    }
    if (first == "loop") {
      flush();
      continue;
    }
    int degree = 0;
    try {
      degree = std::stoi(first);
    } catch (const std::exception&) {
      throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": expected degree");
    }
    if (degree != 1 && degree != 2)
      throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": degree must be 1 or 2");
    TrimSegment seg;
    seg.degree = degree;
    for (int k = 0; k <= degree; ++k) {
      if (!(ss >> seg.ctrl[k][0] >> seg.ctrl[k][1]))
        throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": missing coefficients");
    }
    current.segments.push_back(seg);
  }
  flush();
  return loops;
}

std::vector<TrimLoop> load_loops(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return read_loops(in);
}

void write_loops(std::ostream& out, const std::vector<TrimLoop>& loops) {
  out << std::setprecision(17);
  for (std::size_t l = 0; l < loops.size(); ++l) {
    if (l > 0) out << "loop\n";
    for (const auto& seg : loops[l].segments) {
      out << seg.degree;
      for (int k = 0; k <= seg.degree; ++k) out << ' ' << seg.ctrl[k][0] << ' ' << seg.ctrl[k][1];
      out << '\n';
    }
  }
}

}  // namespace cutpatch::trim
