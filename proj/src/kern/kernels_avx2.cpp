// AVX2+FMA backend. Compiled with -mavx2 -mfma; callers reach it only through
// the dispatch table after a CPUID check. Accumulation order per output
// element matches the scalar reference exactly (same k-order, fused MACs), so
// results are bitwise identical to the scalar backend.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "gnnsim/kern/kernels.hpp"

namespace gnnsim::kern::avx2 {

namespace {

void matmul_f64(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                std::size_t n) {
  const std::size_t nv = n & ~std::size_t{3};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nv; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d av = _mm256_set1_pd(a[i * k + p]);
        const __m256d bv = _mm256_loadu_pd(b + p * n + j);
        acc = _mm256_fmadd_pd(av, bv, acc);
      }
      _mm256_storeu_pd(c + i * n + j, acc);
    }
    for (std::size_t j = nv; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[i * k + p], b[p * n + j], acc);
      c[i * n + j] = acc;
    }
  }
}

void matmul_f32(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                std::size_t n) {
  const std::size_t nv = n & ~std::size_t{7};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nv; j += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256 av = _mm256_set1_ps(a[i * k + p]);
        const __m256 bv = _mm256_loadu_ps(b + p * n + j);
        acc = _mm256_fmadd_ps(av, bv, acc);
      }
      _mm256_storeu_ps(c + i * n + j, acc);
    }
    for (std::size_t j = nv; j < n; ++j) {
      float acc = 0.0f;
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[i * k + p], b[p * n + j], acc);
      c[i * n + j] = acc;
    }
  }
}

void axpy_f64(double a, const double* x, double* y, std::size_t n) {
  const std::size_t nv = n & ~std::size_t{3};
  const __m256d av = _mm256_set1_pd(a);
  for (std::size_t i = 0; i < nv; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, xv, yv));
  }
  for (std::size_t i = nv; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  const std::size_t nv = n & ~std::size_t{7};
  const __m256 av = _mm256_set1_ps(a);
  for (std::size_t i = 0; i < nv; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256 yv = _mm256_loadu_ps(y + i);
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, xv, yv));
  }
  for (std::size_t i = nv; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void relu_f64(double* x, std::size_t n) {
  const std::size_t nv = n & ~std::size_t{3};
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < nv; i += 4) {
    // max(x, zero): vmaxpd returns the second operand when x <= 0 or x is
    // NaN, matching the scalar x > 0 ? x : 0 (including -0.0 -> +0.0).
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (std::size_t i = nv; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_f32(float* x, std::size_t n) {
  const std::size_t nv = n & ~std::size_t{7};
  const __m256 zero = _mm256_setzero_ps();
  for (std::size_t i = 0; i < nv; i += 8) {
    _mm256_storeu_ps(x + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  }
  for (std::size_t i = nv; i < n; ++i) x[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

}  // namespace

extern const Ops kOps = {
    matmul_f64, matmul_f32, axpy_f64, axpy_f32, relu_f64, relu_f32,
};

}  // namespace gnnsim::kern::avx2
