#pragma once

// Discretization of a multipatch surface (active meshes, dofs, cached
// quadrature) and assembly of the stabilized Nitsche system.

#include "cutpatch/basis.hpp"
#include "cutpatch/linalg.hpp"
#include "cutpatch/quadrature.hpp"
#include "cutpatch/surface.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace cutpatch::assembly {

using linalg::SparseSym;
using linalg::Vector;

struct FormParams {
  double beta = 100.0;
  /// gamma_1..gamma_p; a shorter list is padded with its last value, an
  /// empty list means 1e-2 for every k.
  std::vector<double> gamma;

  double gamma_k(int k) const;
  void validate() const;
};

struct DiscretizationOptions {
  int bulk_degree = -1;       ///< exactness of the cell rules, -1: 2p + 2
  int interface_points = -1;  ///< Gauss points per curve piece, -1: p + 2
  bool prune = true;          ///< drop zero weights from cut rules
};

class Discretization {
 public:
  Discretization(const Surface& surface, int n, int order, DiscretizationOptions options = {});

  const Surface& surface() const { return *surface_; }
  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  int order() const { return shape_.order(); }
  int bulk_degree() const { return bulk_degree_; }
  int num_patches() const { return static_cast<int>(meshes_.size()); }

  const mesh::ActiveMesh& mesh(int patch) const { return meshes_[patch]; }
  const basis::ShapeSet& shape() const { return shape_; }
  const basis::DofMap& dofs() const { return *dofs_; }
  /// Rule of the cell at `slot` of mesh(patch).cells().
  const quadrature::CutRule& rule(int patch, int slot) const { return rules_[patch][slot]; }
  const std::vector<quadrature::InterfaceSegment>& interface_pieces(int k) const { return iface_[k]; }
  const std::vector<quadrature::InterfaceSegment>& boundary_pieces(int k) const { return bdry_[k]; }

 private:
  const Surface* surface_;
  int n_;
  int bulk_degree_;
  basis::ShapeSet shape_;
  std::vector<mesh::ActiveMesh> meshes_;
  std::unique_ptr<basis::DofMap> dofs_;
  std::vector<std::vector<quadrature::CutRule>> rules_;
  std::vector<std::vector<quadrature::InterfaceSegment>> iface_;
  std::vector<std::vector<quadrature::InterfaceSegment>> bdry_;
};

/// Point on a boundary curve handed to the boundary data.
struct BoundaryPoint {
  int patch = -1;
  RefPoint x;
  Vec2 conormal;  ///< reference coordinates of the unit outward conormal
};

struct ProblemData {
  std::function<double(int patch, const RefPoint&)> load;
  std::function<double(const BoundaryPoint&)> dirichlet;
  std::function<double(const BoundaryPoint&)> neumann;
};

/// Dense local blocks summed into global triplets, load and constraint.
class Accumulator {
 public:
  explicit Accumulator(int ndof);

  void add_block(std::span<const int> dofs, const std::vector<double>& K);
  void add_vector(std::span<const int> dofs, const std::vector<double>& v, Vector& target);

  int ndof() const { return static_cast<int>(b.size()); }
  SparseSym matrix() const;

  std::vector<linalg::Triplet> triplets;
  Vector b;
  Vector c;
};

void assemble_bulk(const Discretization& d, int patch, const ProblemData* data, Accumulator& acc);
void assemble_interface(const Discretization& d, int interface, const FormParams& params, Accumulator& acc);
void assemble_ghost_penalty(const Discretization& d, int patch, const FormParams& params, Accumulator& acc);
void assemble_boundary(const Discretization& d, const ProblemData& data, const FormParams& params,
                       Accumulator& acc);

struct System {
  SparseSym A;
  Vector b;
  Vector c;  ///< c_i = (phi_i, 1)
  bool constrained = false;  ///< closed surface: mean-value constraint needed
};

System assemble(const Discretization& d, const ProblemData& data, const FormParams& params);
/// Consistent mass matrix (phi_i, phi_j) over the surface.
SparseSym assemble_mass(const Discretization& d);

struct Solution {
  Vector u;
  double multiplier = 0.0;
  double residual = 0.0;  ///< |A u + lambda c - b| / |b|
  double mean = 0.0;      ///< c^T u
};

/// Saddle-point solve with c^T u = 0 when constrained, plain solve
/// otherwise. Conjugate gradients above `direct_limit` unknowns.
Solution solve(const System& sys, bool constrained, int direct_limit = 200000);

/// u_h and (optionally) its reference gradient at x in an active cell.
double evaluate(const Discretization& d, const Vector& u, int patch, int cell_id, const RefPoint& x,
                Vec2* grad = nullptr);

}  // namespace cutpatch::assembly
