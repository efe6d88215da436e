#include "cutpatch/common.hpp"

namespace cutpatch {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::singular_jacobian: return "singular jacobian";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::out_of_domain: return "out of domain";
    case ErrorCode::zero_tangent: return "zero tangent";
    case ErrorCode::invalid_input: return "invalid input";
    case ErrorCode::orientation: return "orientation";
    case ErrorCode::empty_domain: return "empty domain";
    case ErrorCode::unsupported_order: return "unsupported order";
    case ErrorCode::order_exceeded: return "order exceeded";
    case ErrorCode::mapping_failure: return "mapping failure";
    case ErrorCode::singular_system: return "singular system";
    case ErrorCode::kernel_mismatch: return "kernel dimension mismatch";
    case ErrorCode::insufficient_data: return "insufficient data";
    case ErrorCode::overlapping_boundary: return "overlapping boundary";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace cutpatch
