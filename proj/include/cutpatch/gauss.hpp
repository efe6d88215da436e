#pragma once

#include <vector>

namespace cutpatch::quadrature {

/// Gauss-Legendre rule on [0,1].
struct Gauss1D {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;  ///< exact for polynomials up to this degree

  int size() const { return static_cast<int>(points.size()); }
};

inline constexpr int kMaxGaussPoints = 30;

/// n-point Gauss-Legendre rule on [0,1], exact for P_{2n-1}.
/// Rules are computed once and cached; the returned reference stays valid.
const Gauss1D& gauss1d(int num_points);

/// Smallest Gauss rule exact for polynomials of the given degree.
const Gauss1D& gauss_for_degree(int degree);

/// Number of Gauss points needed to integrate P_degree exactly.
inline int gauss_points_for_degree(int degree) { return degree < 1 ? 1 : (degree + 2) / 2; }

}  // namespace cutpatch::quadrature
