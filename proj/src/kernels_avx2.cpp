// Compiled with -mavx2 -mfma. Nothing in here may run unless avx2_table()
// confirmed CPU support.

#include "qwalk/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace qwalk::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_avx2(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy_avx2(aip, b + p * n, crow, n);
    }
  }
}

// Vectorised over eigenvalues. Phases advance by complex rotation
// exp(i dt theta) and are reseeded from cos/sin every kReseed steps, which
// bounds the drift of the recurrence to a few ulps.
constexpr std::size_t kReseed = 16;

void phase_sum_avx2(const double* coeff, const double* theta, std::size_t d,
                    double t0, double dt, std::size_t count, double* re,
                    double* im) {
  const std::size_t padded = (d + 3) / 4 * 4;
  std::vector<double> c(padded, 0.0), th(padded, 0.0), rot_re(padded, 1.0),
      rot_im(padded, 0.0), z_re(padded, 0.0), z_im(padded, 0.0);
  std::copy(coeff, coeff + d, c.begin());
  std::copy(theta, theta + d, th.begin());
  for (std::size_t j = 0; j < d; ++j) {
    rot_re[j] = std::cos(dt * th[j]);
    rot_im[j] = std::sin(dt * th[j]);
  }

  for (std::size_t s = 0; s < count; ++s) {
    if (s % kReseed == 0) {
      const double t = t0 + static_cast<double>(s) * dt;
      for (std::size_t j = 0; j < d; ++j) {
        z_re[j] = std::cos(t * th[j]);
        z_im[j] = std::sin(t * th[j]);
      }
    } else {
      for (std::size_t j = 0; j < padded; j += 4) {
        const __m256d zr = _mm256_loadu_pd(z_re.data() + j);
        const __m256d zi = _mm256_loadu_pd(z_im.data() + j);
        const __m256d rr = _mm256_loadu_pd(rot_re.data() + j);
        const __m256d ri = _mm256_loadu_pd(rot_im.data() + j);
        const __m256d nr = _mm256_fmsub_pd(zr, rr, _mm256_mul_pd(zi, ri));
        const __m256d ni = _mm256_fmadd_pd(zr, ri, _mm256_mul_pd(zi, rr));
        _mm256_storeu_pd(z_re.data() + j, nr);
        _mm256_storeu_pd(z_im.data() + j, ni);
      }
    }
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    for (std::size_t j = 0; j < padded; j += 4) {
      const __m256d cj = _mm256_loadu_pd(c.data() + j);
      acc_re = _mm256_fmadd_pd(cj, _mm256_loadu_pd(z_re.data() + j), acc_re);
      acc_im = _mm256_fmadd_pd(cj, _mm256_loadu_pd(z_im.data() + j), acc_im);
    }
    re[s] = hsum(acc_re);
    im[s] = hsum(acc_im);
  }
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, gemm_avx2,
                                 phase_sum_avx2};
  return table;
}

}  // namespace qwalk::kernels
