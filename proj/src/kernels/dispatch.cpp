#include "cutpatch/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace cutpatch::kernels {

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("CUTPATCH_KERNELS");
    if (env && std::string_view(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace cutpatch::kernels
