#include "cutpatch/kernels.hpp"

namespace cutpatch::kernels {

namespace {

void weighted_gram(int nb, int nq, const double* gx, const double* gy, const double* coef,
                   double* K) {
  for (int q = 0; q < nq; ++q) {
    const double m00 = coef[3 * q], m01 = coef[3 * q + 1], m11 = coef[3 * q + 2];
    const double* x = gx + q * nb;
    const double* y = gy + q * nb;
    for (int a = 0; a < nb; ++a) {
      const double cx = m00 * x[a] + m01 * y[a];
      const double cy = m01 * x[a] + m11 * y[a];
      double* row = K + a * nb;
      for (int b = 0; b < nb; ++b) row[b] += cx * x[b] + cy * y[b];
    }
  }
}

void weighted_mass(int nb, int nq, const double* phi, const double* w, double* M) {
  for (int q = 0; q < nq; ++q) {
    const double* v = phi + q * nb;
    for (int a = 0; a < nb; ++a) {
      const double c = w[q] * v[a];
      double* row = M + a * nb;
      for (int b = 0; b < nb; ++b) row[b] += c * v[b];
    }
  }
}

void weighted_load(int nb, int nq, const double* phi, const double* wf, double* b) {
  for (int q = 0; q < nq; ++q) {
    const double* v = phi + q * nb;
    for (int a = 0; a < nb; ++a) b[a] += wf[q] * v[a];
  }
}

void sym_rank2(int n, double alpha, const double* u, const double* v, double* K) {
  for (int a = 0; a < n; ++a) {
    const double ua = alpha * u[a], va = alpha * v[a];
    double* row = K + a * n;
    for (int b = 0; b < n; ++b) row[b] += ua * v[b] + va * u[b];
  }
}

void rank1(int n, double alpha, const double* u, double* K) {
  for (int a = 0; a < n; ++a) {
    const double ua = alpha * u[a];
    double* row = K + a * n;
    for (int b = 0; b < n; ++b) row[b] += ua * u[b];
  }
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",  weighted_gram, weighted_mass, weighted_load,
                                 sym_rank2, rank1,         dot,           axpy};
  return table;
}

}  // namespace cutpatch::kernels
