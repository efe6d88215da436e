#include "cutpatch/gauss.hpp"

#include "cutpatch/common.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace cutpatch::quadrature {

namespace {

// Newton iteration on P_n with the Chebyshev-like initial guess, then
// mapped from [-1,1] to [0,1].
Gauss1D compute_rule(int n) {
  Gauss1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.degree = 2 * n - 1;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order on [0,1]
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

}  // namespace

const Gauss1D& gauss1d(int num_points) {
  if (num_points < 1 || num_points > kMaxGaussPoints)
    throw Error(ErrorCode::unsupported_order,
                "gauss1d supports 1.." + std::to_string(kMaxGaussPoints) + " points, got " +
                    std::to_string(num_points));
  static std::array<Gauss1D, kMaxGaussPoints + 1> table;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int n = 1; n <= kMaxGaussPoints; ++n) table[n] = compute_rule(n);
  });
  return table[num_points];
}

const Gauss1D& gauss_for_degree(int degree) { return gauss1d(gauss_points_for_degree(degree)); }

}  // namespace cutpatch::quadrature
