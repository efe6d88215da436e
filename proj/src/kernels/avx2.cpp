#include "cutpatch/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define CUTPATCH_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace cutpatch::kernels {

#ifdef CUTPATCH_HAVE_AVX2_KERNELS

namespace {

#define CUTPATCH_AVX2 __attribute__((target("avx2,fma")))

// row[0..n) += c * x[0..n)
CUTPATCH_AVX2 inline void row_axpy(int n, double c, const double* x, double* row) {
  const __m256d vc = _mm256_set1_pd(c);
  int b = 0;
  for (; b + 4 <= n; b += 4) {
    const __m256d r = _mm256_loadu_pd(row + b);
    _mm256_storeu_pd(row + b, _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + b), r));
  }
  for (; b < n; ++b) row[b] += c * x[b];
}

// row[0..n) += c * x + d * y
CUTPATCH_AVX2 inline void row_axpy2(int n, double c, const double* x, double d, const double* y,
                                    double* row) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vd = _mm256_set1_pd(d);
  int b = 0;
  for (; b + 4 <= n; b += 4) {
    __m256d r = _mm256_loadu_pd(row + b);
    r = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + b), r);
    r = _mm256_fmadd_pd(vd, _mm256_loadu_pd(y + b), r);
    _mm256_storeu_pd(row + b, r);
  }
  for (; b < n; ++b) row[b] += c * x[b] + d * y[b];
}

CUTPATCH_AVX2 void weighted_gram(int nb, int nq, const double* gx, const double* gy,
                                 const double* coef, double* K) {
  for (int q = 0; q < nq; ++q) {
    const double m00 = coef[3 * q], m01 = coef[3 * q + 1], m11 = coef[3 * q + 2];
    const double* x = gx + q * nb;
    const double* y = gy + q * nb;
    for (int a = 0; a < nb; ++a) {
      const double cx = m00 * x[a] + m01 * y[a];
      const double cy = m01 * x[a] + m11 * y[a];
      row_axpy2(nb, cx, x, cy, y, K + a * nb);
    }
  }
}

CUTPATCH_AVX2 void weighted_mass(int nb, int nq, const double* phi, const double* w, double* M) {
  for (int q = 0; q < nq; ++q) {
    const double* v = phi + q * nb;
    for (int a = 0; a < nb; ++a) row_axpy(nb, w[q] * v[a], v, M + a * nb);
  }
}

CUTPATCH_AVX2 void weighted_load(int nb, int nq, const double* phi, const double* wf, double* b) {
  for (int q = 0; q < nq; ++q) row_axpy(nb, wf[q], phi + q * nb, b);
}

CUTPATCH_AVX2 void sym_rank2(int n, double alpha, const double* u, const double* v, double* K) {
  for (int a = 0; a < n; ++a) row_axpy2(n, alpha * u[a], v, alpha * v[a], u, K + a * n);
}

CUTPATCH_AVX2 void rank1(int n, double alpha, const double* u, double* K) {
  for (int a = 0; a < n; ++a) row_axpy(n, alpha * u[a], u, K + a * n);
}

CUTPATCH_AVX2 double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

CUTPATCH_AVX2 void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

#undef CUTPATCH_AVX2

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const KernelTable table{"avx2",    weighted_gram, weighted_mass, weighted_load,
                                 sym_rank2, rank1,         dot,           axpy};
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace cutpatch::kernels
