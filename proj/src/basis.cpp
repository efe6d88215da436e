#include "cutpatch/basis.hpp"

#include <algorithm>
#include <cmath>

namespace cutpatch::basis {

ShapeSet::ShapeSet(int order) : p_(order) {
  if (order < 1 || order > 3) throw Error(ErrorCode::unsupported_order, "shape order must be 1..3");
  // L_a(xi) = prod_{b != a} (xi - xi_b) / (xi_a - xi_b), expanded in monomials
  coeffs_.assign(p_ + 1, std::vector<double>(p_ + 1, 0.0));
  for (int a = 0; a <= p_; ++a) {
    std::vector<double> poly{1.0};
    const double xa = static_cast<double>(a) / p_;
    for (int b = 0; b <= p_; ++b) {
      if (b == a) continue;
      const double xb = static_cast<double>(b) / p_;
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t m = 0; m < poly.size(); ++m) {
        next[m + 1] += poly[m] / (xa - xb);
        next[m] -= poly[m] * xb / (xa - xb);
      }
      poly = std::move(next);
    }
    coeffs_[a] = poly;
  }
}

void ShapeSet::eval_1d(double xi, int k, std::span<double> out) const {
  for (int a = 0; a <= p_; ++a) {
    double v = 0.0, pw = 1.0;
    for (int m = k; m <= p_; ++m) {
      double fall = 1.0;  // m (m-1) ... (m-k+1)
      for (int t = 0; t < k; ++t) fall *= m - t;
      v += coeffs_[a][m] * fall * pw;
      pw *= xi;
    }
    out[a] = v;
  }
}

void ShapeSet::eval_local(const Vec2& local, int dx, int dy, std::span<double> out) const {
  if (dx < 0 || dy < 0 || dx + dy > p_)
    throw Error(ErrorCode::order_exceeded, "derivative order exceeds the shape order");
  double lx[4], ly[4];
  eval_1d(local[0], dx, {lx, 4});
  eval_1d(local[1], dy, {ly, 4});
  for (int ay = 0; ay <= p_; ++ay)
    for (int ax = 0; ax <= p_; ++ax) out[ay * (p_ + 1) + ax] = lx[ax] * ly[ay];
}

void ShapeSet::eval(const trim::Box& cell, const RefPoint& x, int dx, int dy,
                    std::span<double> out) const {
  const Vec2 local = (x - cell.lo) / cell.size;
  eval_local(local, dx, dy, out);
  const double scale = std::pow(cell.size, -(dx + dy));
  for (int a = 0; a < size(); ++a) out[a] *= scale;
}

void ShapeSet::eval_gradients(const trim::Box& cell, const RefPoint& x, std::span<double> gx,
                              std::span<double> gy) const {
  const Vec2 local = (x - cell.lo) / cell.size;
  double vx[4], vy[4], dxv[4], dyv[4];
  eval_1d(local[0], 0, {vx, 4});
  eval_1d(local[1], 0, {vy, 4});
  eval_1d(local[0], 1, {dxv, 4});
  eval_1d(local[1], 1, {dyv, 4});
  const double inv = 1.0 / cell.size;
  for (int ay = 0; ay <= p_; ++ay) {
    for (int ax = 0; ax <= p_; ++ax) {
      const int a = ay * (p_ + 1) + ax;
      gx[a] = dxv[ax] * vy[ay] * inv;
      gy[a] = vx[ax] * dyv[ay] * inv;
    }
  }
}

Vec2 ShapeSet::node(int a) const {
  return Vec2(static_cast<double>(a % (p_ + 1)) / p_, static_cast<double>(a / (p_ + 1)) / p_);
}

DofMap::DofMap(const std::vector<const mesh::ActiveMesh*>& meshes, int order) : p_(order) {
  offsets_.push_back(0);
  for (const auto* m : meshes) {
    const int n = m->grid().n;
    const int side = n * p_ + 1;
    grid_n_.push_back(n);
    std::vector<int> lat(side * side, -1);
    for (const auto& c : m->cells()) {
      const int i0 = m->grid().ix(c.id) * p_, j0 = m->grid().iy(c.id) * p_;
      for (int b = 0; b <= p_; ++b)
        for (int a = 0; a <= p_; ++a) lat[(j0 + b) * side + i0 + a] = 0;
    }
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i < side; ++i) {
        int& slot = lat[j * side + i];
        if (slot < 0) continue;
        slot = ndof_++;
        positions_.emplace_back(i, j);
      }
    }
    lattice_.push_back(std::move(lat));
    offsets_.push_back(ndof_);
  }
}

int DofMap::node_dof(int patch, int i, int j) const {
  const int side = grid_n_[patch] * p_ + 1;
  if (i < 0 || j < 0 || i >= side || j >= side) return -1;
  return lattice_[patch][j * side + i];
}

void DofMap::cell_dofs(int patch, int cell_id, std::span<int> out) const {
  const int n = grid_n_[patch];
  const int i0 = (cell_id % n) * p_, j0 = (cell_id / n) * p_;
  const int side = n * p_ + 1;
  const auto& lat = lattice_[patch];
  for (int b = 0; b <= p_; ++b)
    for (int a = 0; a <= p_; ++a) out[b * (p_ + 1) + a] = lat[(j0 + b) * side + i0 + a];
}

std::vector<int> DofMap::cell_dofs(int patch, int cell_id) const {
  std::vector<int> out((p_ + 1) * (p_ + 1));
  cell_dofs(patch, cell_id, out);
  return out;
}

int DofMap::dof_patch(int dof) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), dof);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

RefPoint DofMap::dof_position(int dof) const {
  const int patch = dof_patch(dof);
  const double h = 1.0 / (grid_n_[patch] * p_);
  return RefPoint(positions_[dof].first * h, positions_[dof].second * h);
}

}  // namespace cutpatch::basis
