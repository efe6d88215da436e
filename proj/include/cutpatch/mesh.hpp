#pragma once

// Structured background grid on the reference square, active cells of a
// trimmed patch and the faces carrying the ghost penalty.

#include "cutpatch/trim.hpp"

#include <iosfwd>
#include <vector>

namespace cutpatch::mesh {

struct BackgroundGrid {
  int n = 1;

  double h() const { return 1.0 / n; }
  int cell_id(int i, int j) const { return j * n + i; }
  int ix(int id) const { return id % n; }
  int iy(int id) const { return id / n; }
  trim::Box box(int id) const { return {Vec2(ix(id) * h(), iy(id) * h()), h()}; }
  /// Cell containing p (clamped to the grid).
  int locate(const Vec2& p) const;
};

enum class CellKind { interior, cut };

struct ActiveCell {
  int id = -1;
  CellKind kind = CellKind::interior;
  double area = 0.0;
  /// Oriented boundary of the intersection with the subdomain (cut cells only).
  std::vector<trim::TrimLoop> boundary;
};

/// Face between two active cells; the Euclidean normal is +e_axis and
/// points from cell_minus to cell_plus.
struct Face {
  int cell_minus = -1;
  int cell_plus = -1;
  int normal_axis = 0;  ///< 0: x1-normal (vertical face), 1: x2-normal
};

class ActiveMesh {
 public:
  ActiveMesh(BackgroundGrid grid, std::vector<ActiveCell> cells);

  const BackgroundGrid& grid() const { return grid_; }
  const std::vector<ActiveCell>& cells() const { return cells_; }
  const std::vector<Face>& stab_faces() const { return stab_faces_; }
  /// Active cells crossed by the trim boundary (ids).
  const std::vector<int>& cut_boundary_cells() const { return cut_ids_; }

  bool is_active(int id) const { return id >= 0 && id < static_cast<int>(slot_.size()) && slot_[id] >= 0; }
  /// Position of a cell id in cells(), or -1.
  int slot(int id) const { return is_active(id) ? slot_[id] : -1; }
  const ActiveCell& cell(int id) const { return cells_.at(slot_.at(id)); }

  int num_interior() const;
  int num_cut() const;
  /// Smallest area fraction |K cap Omega| / |K| over cut cells (1 if none).
  double min_cut_fraction() const;

 private:
  BackgroundGrid grid_;
  std::vector<ActiveCell> cells_;
  std::vector<int> slot_;
  std::vector<Face> stab_faces_;
  std::vector<int> cut_ids_;
};

/// Active cells = cells whose intersection with dom has area > 1e-12 h^2.
ActiveMesh build_active_mesh(const trim::RefSubdomain& dom, const BackgroundGrid& grid);

/// Active cells reachable from `cell` through at most l steps of face or
/// node adjacency within the active set.
std::vector<int> neighborhood(const ActiveMesh& mesh, int cell, int l);

/// CSV row(s): patch, n, active, interior, cut, stab_faces, min_cut_fraction.
void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, int patch, const ActiveMesh& mesh);

}  // namespace cutpatch::mesh
