#include "cutpatch/common.hpp"
#include "cutpatch/linalg.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace cutpatch;
using namespace cutpatch::linalg;

namespace {

SparseSym diag(const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  return SparseSym::from_triplets(static_cast<int>(d.size()), t);
}

// Weighted graph Laplacian of a random connected graph (ring plus chords),
// optionally shifted by a random positive diagonal.
SparseSym random_laplacian(std::mt19937_64& rng, int n, bool shifted) {
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<Triplet> t;
  auto edge = [&](int i, int j, double v) {
    t.emplace_back(i, i, v);
    t.emplace_back(j, j, v);
    t.emplace_back(i, j, -v);
    t.emplace_back(j, i, -v);
  };
  for (int i = 0; i < n; ++i) edge(i, (i + 1) % n, w(rng));
  for (int k = 0; k < 2 * n; ++k) {
    const int i = node(rng), j = node(rng);
    if (i != j) edge(i, j, w(rng));
  }
  if (shifted)
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, 0.01 * w(rng));
  return SparseSym::from_triplets(n, t);
}

}  // namespace

TEST_CASE("condition numbers of diagonal matrices") {
  CHECK(condition_estimate(diag({1, 1, 1}), 0) == doctest::Approx(1.0));
  CHECK(condition_estimate(diag({1, 2, 4}), 0) == doctest::Approx(4.0));
  CHECK(condition_estimate(diag({0, 1, 10}), 1) == doctest::Approx(10.0));
  CHECK_THROWS_AS(condition_estimate(diag({0, 1, 10}), 0), Error);
  ConditionOptions loose;
  loose.strict_kernel = false;
  CHECK(std::isinf(condition_estimate(diag({0, 0, 10}), 1, {}, loose)));
}

TEST_CASE("condition number is scale invariant") {
  std::mt19937_64 rng(51);
  const auto A = random_laplacian(rng, 60, true);
  const SparseSym B(SparseMatrix(3.5 * A.matrix()));
  CHECK(condition_estimate(A, 0) == doctest::Approx(condition_estimate(B, 0)).epsilon(1e-10));
}

TEST_CASE("triplet assembly, symmetry and dump") {
  const auto A = SparseSym::from_triplets(2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {0, 0, 1.0}, {1, 1, 0.0}});
  CHECK(A.matrix().coeff(0, 0) == 2.0);
  CHECK(A.matrix().nonZeros() == 3);
  CHECK(A.asymmetry() == 0.0);
  CHECK(A.max_abs() == 2.0);
  std::ostringstream out;
  A.write_triplets(out);
  std::istringstream in(out.str());
  int lines = 0, r, c;
  double v, sum = 0.0;
  while (in >> r >> c >> v) {
    ++lines;
    sum += v;
  }
  CHECK(lines == 3);
  CHECK(sum == doctest::Approx(6.0));
}

TEST_CASE("direct and conjugate-gradient solves of a random SPD system") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd M(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) M(i, j) = u(rng);
  const Eigen::MatrixXd D = M * M.transpose() + 50 * Eigen::MatrixXd::Identity(50, 50);
  const SparseSym A(SparseMatrix(D.sparseView()));
  Vector b(50);
  for (int i = 0; i < 50; ++i) b[i] = u(rng);
  const Vector x = solve_direct(A, b);
  CHECK((D * x - b).norm() < 1e-12 * b.norm());
  const auto cg = solve_cg(A, b);
  CHECK(cg.relative_residual < 1e-12);
  CHECK((cg.x - x).norm() < 1e-10 * x.norm());
  CHECK_THROWS_AS(solve_direct(diag({1, 0}), Vector::Ones(2)), Error);
}

TEST_CASE("saddle-point solve") {
  // [[I, c], [c^T, 0]] with c = (1, 1), b = (1, 0): u = (1/2, -1/2), lambda = 1/2
  Vector c(2), b(2);
  c << 1, 1;
  b << 1, 0;
  const auto s = solve_saddle(diag({1, 1}), c, b);
  CHECK(s.u[0] == doctest::Approx(0.5));
  CHECK(s.u[1] == doctest::Approx(-0.5));
  CHECK(s.multiplier == doctest::Approx(0.5));

  std::mt19937_64 rng(53);
  const auto L = random_laplacian(rng, 40, false);
  Vector f = Vector::Random(40);
  f.array() -= f.mean();
  const auto r = solve_saddle(L, Vector::Ones(40), f);
  CHECK(std::abs(r.u.sum()) < 1e-12);
  CHECK((L * r.u - f).norm() < 1e-10 * f.norm());
  CHECK(std::abs(r.multiplier) < 1e-12);
}

TEST_CASE("Lanczos condition estimate against the dense eigensolver") {
  std::mt19937_64 rng(54);
  ConditionOptions iterative;
  iterative.dense_limit = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const bool shifted = trial % 2 == 0;
    const auto A = random_laplacian(rng, 500, shifted);
    const int k = shifted ? 0 : 1;
    std::vector<Vector> kernel;
    if (!shifted) kernel.push_back(Vector::Ones(500));
    const double dense = condition_estimate(A, k);
    const double lanczos = condition_estimate(A, k, kernel, iterative);
    CHECK(std::abs(lanczos - dense) < 0.05 * dense);
  }
}

TEST_CASE("Lanczos largest eigenvalue of a diagonal operator") {
  const int n = 200;
  const double top = lanczos_largest(
      [](const Vector& x, Vector& y) {
        y = x;
        for (int i = 0; i < x.size(); ++i) y[i] *= 1.0 + i;
      },
      n, {}, 1e-8);
  CHECK(top == doctest::Approx(200.0).epsilon(1e-6));
}
