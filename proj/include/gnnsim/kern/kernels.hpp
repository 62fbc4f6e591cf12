#pragma once
// Dense math primitives used by the golden model (f64) and the simulator
// datapath (f32). Scalar reference implementations plus an AVX2 backend
// selected at runtime via CPUID.
//
// Contract: every multiply-add is fused (scalar code uses std::fma, vector
// code uses fused instructions) and per-element accumulation order is fixed,
// so all backends produce bitwise-identical results. dot() is deliberately
// scalar on every backend: a lane-split reduction would change the summation
// order, and the order is part of the contract.

#include <cstddef>

namespace gnnsim::kern {

enum class Backend { scalar, avx2 };

struct Ops {
  // c[m x n] = a[m x k] * b[k x n], row major, c overwritten.
  void (*matmul_f64)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                     std::size_t n);
  void (*matmul_f32)(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                     std::size_t n);
  // y[i] += a * x[i]
  void (*axpy_f64)(double a, const double* x, double* y, std::size_t n);
  void (*axpy_f32)(float a, const float* x, float* y, std::size_t n);
  // x[i] = x[i] > 0 ? x[i] : 0  (maps -0.0 to +0.0 on every backend)
  void (*relu_f64)(double* x, std::size_t n);
  void (*relu_f32)(float* x, std::size_t n);
};

const Ops& ops(Backend b);

// Backend picked once at startup: avx2 when the CPU reports AVX2+FMA,
// otherwise scalar.
Backend active_backend();
const Ops& active();
const char* backend_name(Backend b);
bool backend_available(Backend b);

// Sequential fused dot product; identical on all backends.
double dot(const double* x, const double* y, std::size_t n);
float dot(const float* x, const float* y, std::size_t n);

// Convenience wrappers over active().
inline void matmul(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                   std::size_t n) {
  active().matmul_f64(a, b, c, m, k, n);
}
inline void matmul(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                   std::size_t n) {
  active().matmul_f32(a, b, c, m, k, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy_f64(a, x, y, n);
}
inline void axpy(float a, const float* x, float* y, std::size_t n) { active().axpy_f32(a, x, y, n); }
inline void relu(double* x, std::size_t n) { active().relu_f64(x, n); }
inline void relu(float* x, std::size_t n) { active().relu_f32(x, n); }

}  // namespace gnnsim::kern
