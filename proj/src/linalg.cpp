#include "cutpatch/linalg.hpp"

#include "cutpatch/common.hpp"
#include "cutpatch/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace cutpatch::linalg {

SparseSym SparseSym::from_triplets(int n, const std::vector<Triplet>& triplets) {
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseSym(std::move(m));
}

SparseSym::SparseSym(SparseMatrix m) : m_(std::move(m)) {
  m_.prune(0.0, 0.0);
  m_.makeCompressed();
}

double SparseSym::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double SparseSym::asymmetry() const {
  const SparseMatrix t = m_.transpose();
  const SparseMatrix d = m_ - t;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

void SparseSym::write_triplets(std::ostream& out) const {
  out << std::setprecision(17);
  for (int k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m_, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

Vector solve_direct(const SparseSym& A, const Vector& b) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A.matrix());
  if (ldlt.info() != Eigen::Success)
    throw Error(ErrorCode::singular_system, "LDLT factorization failed");
  Vector x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorCode::singular_system, "LDLT solve failed");
  return x;
}

namespace {

SparseMatrix bordered(const SparseMatrix& A, const std::vector<Vector>& border) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(border.size());
  std::vector<Triplet> t;
  t.reserve(A.nonZeros() + 2 * n * m);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < n; ++i) {
      if (border[c][i] == 0.0) continue;
      t.emplace_back(i, n + c, border[c][i]);
      t.emplace_back(n + c, i, border[c][i]);
    }
  }
  SparseMatrix K(n + m, n + m);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  return K;
}

}  // namespace

SaddleSolution solve_saddle(const SparseSym& A, const Vector& c, const Vector& b) {
  const int n = A.dim();
  const SparseMatrix K = bordered(A.matrix(), {c});
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::singular_system, "saddle LU failed: " + lu.lastErrorMessage());
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = b;
  const Vector sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw Error(ErrorCode::singular_system, "saddle solve failed");
  return {sol.head(n), sol[n]};
}

CgResult solve_cg(const SparseSym& A, const Vector& b, double tolerance, int max_iterations) {
  const auto& k = kernels::active();
  const int n = A.dim();
  if (max_iterations < 0) max_iterations = 10 * n;
  const SparseMatrix& M = A.matrix();
  Vector diag = M.diagonal();
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0))
      throw Error(ErrorCode::singular_system, "non-positive diagonal in CG preconditioner");
    diag[i] = 1.0 / diag[i];
  }
  CgResult res;
  res.x = Vector::Zero(n);
  const double bnorm = std::sqrt(k.dot(n, b.data(), b.data()));
  if (bnorm == 0.0) return res;
  Vector r = b;
  Vector z = diag.cwiseProduct(r);
  Vector p = z;
  Vector Ap(n);
  double rz = k.dot(n, r.data(), z.data());
  for (int it = 1; it <= max_iterations; ++it) {
    Ap.noalias() = M * p;
    const double pAp = k.dot(n, p.data(), Ap.data());
    if (!(pAp > 0.0)) throw Error(ErrorCode::singular_system, "CG breakdown");
    const double alpha = rz / pAp;
    k.axpy(n, alpha, p.data(), res.x.data());
    k.axpy(n, -alpha, Ap.data(), r.data());
    res.iterations = it;
    res.relative_residual = std::sqrt(k.dot(n, r.data(), r.data())) / bnorm;
    if (res.relative_residual < tolerance) return res;
    z = diag.cwiseProduct(r);
    const double rz_next = k.dot(n, r.data(), z.data());
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw Error(ErrorCode::non_convergence, "CG did not reach the tolerance");
}

double lanczos_largest(const LinearOperator& op, int n, const std::vector<Vector>& deflate,
                       double tolerance, int max_steps) {
  auto project = [&](Vector& v) {
    for (const auto& z : deflate) v -= z.dot(v) * z;
  };
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  project(v);
  v.normalize();

  std::vector<Vector> basis{v};
  std::vector<double> alpha, beta;
  Vector w(n);
  double previous = 0.0;
  const int steps = std::min(max_steps, n - static_cast<int>(deflate.size()));
  for (int j = 0; j < steps; ++j) {
    op(basis[j], w);
    project(w);
    const double a = basis[j].dot(w);
    alpha.push_back(a);
    for (const auto& q : basis) w -= q.dot(w) * q;  // full reorthogonalization
    for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = es.eigenvalues()[m - 1];
    const double residual = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    if (j > 0 && residual <= tolerance * std::abs(theta) &&
        std::abs(theta - previous) <= tolerance * std::abs(theta))
      return theta;
    previous = theta;
    if (b <= 1e-14 * std::abs(theta)) return theta;  // invariant subspace
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return previous;
}

double condition_estimate(const SparseSym& A, int exclude_kernel_dim, const std::vector<Vector>& kernel,
                          const ConditionOptions& options) {
  const int n = A.dim();
  if (exclude_kernel_dim < 0 || exclude_kernel_dim >= n)
    throw Error(ErrorCode::invalid_input, "kernel dimension out of range");
  if (n <= options.dense_limit) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(A.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::non_convergence, "dense eigensolve failed");
    const Vector& ev = es.eigenvalues();
    const double lmax = ev[n - 1];
    int below = 0;
    for (int i = 0; i < n; ++i)
      if (ev[i] < 1e-12 * lmax) ++below;
    if (!options.strict_kernel) {
      const double lmin = ev[exclude_kernel_dim];
      return lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    }
    if (below != exclude_kernel_dim)
      throw Error(ErrorCode::kernel_mismatch, std::to_string(below) + " eigenvalues below 1e-12 lambda_max, expected " +
                                                  std::to_string(exclude_kernel_dim));
    return lmax / ev[exclude_kernel_dim];
  }

  if (static_cast<int>(kernel.size()) != exclude_kernel_dim)
    throw Error(ErrorCode::invalid_input, "iterative condition estimate needs the kernel basis");
  // orthonormal kernel basis
  std::vector<Vector> Z;
  for (Vector z : kernel) {
    for (const auto& q : Z) z -= q.dot(z) * q;
    Z.push_back(z.normalized());
  }
  const SparseMatrix& M = A.matrix();
  const double lmax = lanczos_largest([&](const Vector& x, Vector& y) { y.noalias() = M * x; }, n, Z,
                                      options.lanczos_tolerance);

  // largest eigenvalue of the pseudo-inverse on the kernel complement
  double inv_max = 0.0;
  if (Z.empty()) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(M);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::singular_system, "LDLT failed");
    inv_max = lanczos_largest([&](const Vector& x, Vector& y) { y = ldlt.solve(x); }, n, Z,
                              options.lanczos_tolerance);
  } else {
    const SparseMatrix K = bordered(M, Z);
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::singular_system, "bordered LU failed");
    const int m = static_cast<int>(Z.size());
    inv_max = lanczos_largest(
        [&](const Vector& x, Vector& y) {
          Vector rhs = Vector::Zero(n + m);
          rhs.head(n) = x;
          y = lu.solve(rhs).head(n);
        },
        n, Z, options.lanczos_tolerance);
  }
  if (!(inv_max > 0.0)) throw Error(ErrorCode::singular_system, "non-positive inverse spectrum");
  const double lmin = 1.0 / inv_max;
  if (options.strict_kernel && lmin < 1e-12 * lmax)
    throw Error(ErrorCode::kernel_mismatch, "eigenvalue above the kernel is below 1e-12 lambda_max");
  return lmax / lmin;
}

}  // namespace cutpatch::linalg
