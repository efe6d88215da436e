#pragma once

// Dense inner loops of element assembly and the Krylov solvers. A scalar
// reference implementation is always available; an AVX2/FMA variant is
// selected at runtime when the CPU supports it. CUTPATCH_KERNELS=scalar in
// the environment forces the reference kernels.

#include <cstddef>

namespace cutpatch::kernels {

struct KernelTable {
  const char* name;

  /// K[a*nb+b] += sum_q [gx_qa gy_qa] M_q [gx_qb gy_qb]^T with the symmetric
  /// 2x2 M_q given as coef[3q..3q+2] = (m00, m01, m11).
  void (*weighted_gram)(int nb, int nq, const double* gx, const double* gy, const double* coef,
                        double* K);
  /// M[a*nb+b] += sum_q w_q phi_qa phi_qb.
  void (*weighted_mass)(int nb, int nq, const double* phi, const double* w, double* M);
  /// b[a] += sum_q wf_q phi_qa.
  void (*weighted_load)(int nb, int nq, const double* phi, const double* wf, double* b);
  /// K += alpha (u v^T + v u^T), K is n x n row-major.
  void (*sym_rank2)(int n, double alpha, const double* u, const double* v, double* K);
  /// K += alpha u u^T.
  void (*rank1)(int n, double alpha, const double* u, double* K);
  double (*dot)(std::size_t n, const double* x, const double* y);
  /// y += a x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
};

const KernelTable& scalar_kernels();
/// AVX2 table, or nullptr when not built in or not supported by the CPU.
const KernelTable* avx2_kernels();
/// Table used by the library.
const KernelTable& active();

}  // namespace cutpatch::kernels
