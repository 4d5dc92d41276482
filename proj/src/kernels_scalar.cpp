#include "qwalk/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qwalk::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_scalar(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

// Direct evaluation; this is the reference the vector variant is checked
// against.
void phase_sum_scalar(const double* coeff, const double* theta, std::size_t d,
                      double t0, double dt, std::size_t count, double* re,
                      double* im) {
  for (std::size_t s = 0; s < count; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double phase = t * theta[j];
      sr += coeff[j] * std::cos(phase);
      si += coeff[j] * std::sin(phase);
    }
    re[s] = sr;
    im[s] = si;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, gemm_scalar,
                                 phase_sum_scalar};
  return table;
}

}  // namespace qwalk::kernels
