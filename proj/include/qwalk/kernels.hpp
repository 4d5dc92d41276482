#pragma once

// Dense inner loops used by the spectral and transfer code.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2+FMA variant is compiled into a separate translation unit and selected
// at runtime when the CPU supports it. Setting QWALK_SIMD=scalar forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace qwalk::kernels {

struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // c = a * b for row-major a (m x k), b (k x n), c (m x n). c is overwritten.
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);

  // For t_s = t0 + s * dt, s < count:
  //   re[s] + i im[s] = sum_j coeff[j] * exp(i * t_s * theta[j])
  void (*phase_sum)(const double* coeff, const double* theta, std::size_t d,
                    double t0, double dt, std::size_t count, double* re,
                    double* im);
};

const KernelTable& scalar_table();

/// AVX2+FMA table, or nullptr when it was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

/// Table chosen once per process.
const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace qwalk::kernels
