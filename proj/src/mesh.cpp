#include "cutpatch/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <set>

namespace cutpatch::mesh {

int BackgroundGrid::locate(const Vec2& p) const {
  const int i = std::clamp(static_cast<int>(std::floor(p[0] * n)), 0, n - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p[1] * n)), 0, n - 1);
  return cell_id(i, j);
}

ActiveMesh::ActiveMesh(BackgroundGrid grid, std::vector<ActiveCell> cells)
    : grid_(grid), cells_(std::move(cells)), slot_(grid.n * grid.n, -1) {
  std::sort(cells_.begin(), cells_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < cells_.size(); ++k) slot_[cells_[k].id] = static_cast<int>(k);
  for (const auto& c : cells_) {
    if (c.kind == CellKind::cut) cut_ids_.push_back(c.id);
    const int i = grid_.ix(c.id), j = grid_.iy(c.id);
    for (int axis = 0; axis < 2; ++axis) {
      const int ni = i + (axis == 0), nj = j + (axis == 1);
      if (ni >= grid_.n || nj >= grid_.n) continue;
      const int nb = grid_.cell_id(ni, nj);
      if (!is_active(nb)) continue;
      if (c.kind == CellKind::cut || cells_[slot_[nb]].kind == CellKind::cut)
        stab_faces_.push_back({c.id, nb, axis});
    }
  }
}

int ActiveMesh::num_interior() const {
  return static_cast<int>(std::count_if(cells_.begin(), cells_.end(),
                                        [](const auto& c) { return c.kind == CellKind::interior; }));
}

int ActiveMesh::num_cut() const { return static_cast<int>(cut_ids_.size()); }

double ActiveMesh::min_cut_fraction() const {
  double m = 1.0;
  const double h2 = grid_.h() * grid_.h();
  for (int id : cut_ids_) m = std::min(m, cell(id).area / h2);
  return m;
}

ActiveMesh build_active_mesh(const trim::RefSubdomain& dom, const BackgroundGrid& grid) {
  if (grid.n < 2) throw Error(ErrorCode::invalid_input, "background grid needs n >= 2");
  const int n = grid.n;
  const double h = grid.h();

  // cells touched by the trim curves
  std::set<int> candidates;
  auto add_cells_at = [&](const Vec2& p) {
    const double fx = p[0] * n, fy = p[1] * n;
    std::vector<int> is{static_cast<int>(std::floor(fx))};
    std::vector<int> js{static_cast<int>(std::floor(fy))};
    if (std::abs(fx - std::round(fx)) <= 1e-9) is = {static_cast<int>(std::round(fx)) - 1, static_cast<int>(std::round(fx))};
    if (std::abs(fy - std::round(fy)) <= 1e-9) js = {static_cast<int>(std::round(fy)) - 1, static_cast<int>(std::round(fy))};
    for (int i : is)
      for (int j : js)
        if (i >= 0 && i < n && j >= 0 && j < n) candidates.insert(grid.cell_id(i, j));
  };
  for (const auto& loop : dom.loops()) {
    for (const auto& seg : loop.segments) {
      std::vector<double> params{0.0};
      for (double s : trim::intersect_with_gridlines(seg, n)) params.push_back(s);
      params.push_back(1.0);
      for (std::size_t k = 0; k + 1 < params.size(); ++k) {
        if (params[k + 1] - params[k] <= 0.0) continue;
        add_cells_at(seg.eval(0.5 * (params[k] + params[k + 1])));
      }
      add_cells_at(seg.start());
    }
  }

  std::vector<ActiveCell> cells;
  const double h2 = h * h;
  for (int id = 0; id < n * n; ++id) {
    if (candidates.count(id)) {
      auto loops = trim::clip_to_cell(dom, grid.box(id));
      if (loops.empty()) continue;
      const double area = trim::signed_area(loops);
      if (area < 0.0) throw Error(ErrorCode::orientation, "negative clipped area");
      ActiveCell c;
      c.id = id;
      c.area = area;
      if (std::abs(area - h2) <= 1e-12 * h2) {
        c.kind = CellKind::interior;
        c.area = h2;
      } else {
        c.kind = CellKind::cut;
        c.boundary = std::move(loops);
      }
      cells.push_back(std::move(c));
    } else {
      const auto box = grid.box(id);
      const Vec2 center = box.lo + Vec2(0.5 * h, 0.5 * h);
      if (trim::winding_number(dom.loops(), center) != 0)
        cells.push_back({id, CellKind::interior, h2, {}});
    }
  }
  if (cells.empty()) throw Error(ErrorCode::empty_domain, "no active cells");
  return ActiveMesh(grid, std::move(cells));
}

std::vector<int> neighborhood(const ActiveMesh& mesh, int cell, int l) {
  const auto& grid = mesh.grid();
  std::vector<int> out{cell};
  std::set<int> seen{cell};
  std::deque<std::pair<int, int>> queue{{cell, 0}};
  while (!queue.empty()) {
    const auto [id, d] = queue.front();
    queue.pop_front();
    if (d == l) continue;
    const int i = grid.ix(id), j = grid.iy(id);
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int ni = i + di, nj = j + dj;
        if ((di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= grid.n || nj >= grid.n) continue;
        const int nb = grid.cell_id(ni, nj);
        if (!mesh.is_active(nb) || seen.count(nb)) continue;
        seen.insert(nb);
        out.push_back(nb);
        queue.push_back({nb, d + 1});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_stats_header(std::ostream& out) {
  out << "patch,n,active,interior,cut,stab_faces,min_cut_fraction\n";
}

void write_stats_row(std::ostream& out, int patch, const ActiveMesh& mesh) {
  out << patch << ',' << mesh.grid().n << ',' << mesh.cells().size() << ',' << mesh.num_interior()
      << ',' << mesh.num_cut() << ',' << mesh.stab_faces().size() << ',' << mesh.min_cut_fraction()
      << '\n';
}

}  // namespace cutpatch::mesh
