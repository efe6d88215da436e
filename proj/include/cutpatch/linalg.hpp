#pragma once

// Sparse symmetric storage, direct and conjugate-gradient solves, and
// condition-number estimation.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <vector>

namespace cutpatch::linalg {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Symmetric sparse matrix stored in full (both triangles).
class SparseSym {
 public:
  SparseSym() = default;
  /// Duplicates are summed and exact zeros dropped.
  static SparseSym from_triplets(int n, const std::vector<Triplet>& triplets);
  explicit SparseSym(SparseMatrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const SparseMatrix& matrix() const { return m_; }
  Vector operator*(const Vector& x) const { return m_ * x; }

  double max_abs() const;
  /// max |A_ij - A_ji|
  double asymmetry() const;
  /// "row col value" lines, 0-based, one per stored entry.
  void write_triplets(std::ostream& out) const;

 private:
  SparseMatrix m_;
};

/// Factorization of an SPD matrix; throws singular_system on failure.
Vector solve_direct(const SparseSym& A, const Vector& b);

struct SaddleSolution {
  Vector u;
  double multiplier = 0.0;
};

/// Solves [[A, c], [c^T, 0]] [u; lambda] = [b; 0] by sparse LU.
SaddleSolution solve_saddle(const SparseSym& A, const Vector& c, const Vector& b);

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients (max 10 N iterations by default).
/// Also converges for consistent right-hand sides of semidefinite A.
CgResult solve_cg(const SparseSym& A, const Vector& b, double tolerance = 1e-12,
                  int max_iterations = -1);

using LinearOperator = std::function<void(const Vector&, Vector&)>;

/// Largest eigenvalue of a symmetric positive semidefinite operator on the
/// orthogonal complement of `deflate` (orthonormal columns), by Lanczos
/// with full reorthogonalization.
double lanczos_largest(const LinearOperator& op, int n, const std::vector<Vector>& deflate,
                       double tolerance = 1e-4, int max_steps = 400);

struct ConditionOptions {
  int dense_limit = 4000;
  double lanczos_tolerance = 1e-4;
  /// When false, extra near-zero eigenvalues do not throw; the estimate is
  /// lambda_max over the first eigenvalue above the kernel (inf if <= 0).
  bool strict_kernel = true;
};

/// lambda_max / lambda_min^+ where lambda_min^+ is the smallest eigenvalue
/// above the kernel of dimension exclude_kernel_dim. The iterative path
/// (N > dense_limit) needs the kernel basis.
double condition_estimate(const SparseSym& A, int exclude_kernel_dim,
                          const std::vector<Vector>& kernel = {}, const ConditionOptions& options = {});

}  // namespace cutpatch::linalg
