#pragma once

// Tensor-product Lagrange shape functions on grid cells and the per-patch
// global numbering of their nodes.

#include "cutpatch/mesh.hpp"

#include <span>
#include <vector>

namespace cutpatch::basis {

/// Q_p Lagrange basis with equispaced nodes on the unit cell. Basis
/// function a = ay * (p+1) + ax is L_ax(xi) L_ay(eta).
class ShapeSet {
 public:
  explicit ShapeSet(int order);

  int order() const { return p_; }
  int size() const { return (p_ + 1) * (p_ + 1); }

  /// Values of the k-th derivative of all 1D Lagrange polynomials at xi.
  void eval_1d(double xi, int k, std::span<double> out) const;

  /// Derivative d^{dx+dy} / dxi^dx deta^dy of all basis functions at a
  /// local point of the unit cell.
  void eval_local(const Vec2& local, int dx, int dy, std::span<double> out) const;

  /// Same on a physical cell box; derivatives are scaled by h^{-(dx+dy)}.
  void eval(const trim::Box& cell, const RefPoint& x, int dx, int dy, std::span<double> out) const;

  /// Reference gradients (d/dx1, d/dx2) of all basis functions.
  void eval_gradients(const trim::Box& cell, const RefPoint& x, std::span<double> gx,
                      std::span<double> gy) const;

  /// Node position of basis function a on the unit cell.
  Vec2 node(int a) const;

 private:
  int p_;
  // coeffs_[a][m]: coefficient of xi^m in L_a
  std::vector<std::vector<double>> coeffs_;
};

/// Global numbering over the active cells of every patch. Nodes are shared
/// between cells of one patch and never across patches.
class DofMap {
 public:
  DofMap(const std::vector<const mesh::ActiveMesh*>& meshes, int order);

  int order() const { return p_; }
  int num_dofs() const { return ndof_; }
  int num_patches() const { return static_cast<int>(offsets_.size()) - 1; }
  int patch_offset(int patch) const { return offsets_[patch]; }
  int patch_dofs(int patch) const { return offsets_[patch + 1] - offsets_[patch]; }

  /// Global dofs of a cell in ShapeSet order.
  void cell_dofs(int patch, int cell_id, std::span<int> out) const;
  std::vector<int> cell_dofs(int patch, int cell_id) const;

  /// Global dof of lattice node (i, j) of a patch, or -1.
  int node_dof(int patch, int i, int j) const;
  /// Reference position of a global dof.
  RefPoint dof_position(int dof) const;
  int dof_patch(int dof) const;

 private:
  int p_;
  std::vector<int> grid_n_;
  std::vector<int> offsets_;
  std::vector<std::vector<int>> lattice_;  // per patch, (n p + 1)^2
  std::vector<std::pair<int, int>> positions_;  // dof -> lattice (i, j)
  int ndof_ = 0;
};

}  // namespace cutpatch::basis
