#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cutpatch {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Point in the reference square [0,1]^2 (points slightly outside are legal
/// inside the extended domain of a patch).
using RefPoint = Vec2;
/// Point in the ambient space R^3.
using AmbientPoint = Vec3;

enum class ErrorCode {
  singular_jacobian,
  non_convergence,
  out_of_domain,
  zero_tangent,
  invalid_input,
  orientation,
  empty_domain,
  unsupported_order,
  order_exceeded,
  mapping_failure,
  singular_system,
  kernel_mismatch,
  insufficient_data,
  overlapping_boundary,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cutpatch
