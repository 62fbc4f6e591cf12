#include "gnnsim/kern/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace gnnsim::kern {

namespace {

template <typename T>
void matmul_scalar(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T{0};
      for (std::size_t p = 0; p < k; ++p) {
        acc = std::fma(a[i * k + p], b[p * n + j], acc);
      }
      c[i * n + j] = acc;
    }
  }
}

template <typename T>
void axpy_scalar(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

template <typename T>
void relu_scalar(T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > T{0} ? x[i] : T{0};
}

const Ops kScalarOps = {
    matmul_scalar<double>, matmul_scalar<float>, axpy_scalar<double>,
    axpy_scalar<float>,    relu_scalar<double>,  relu_scalar<float>,
};

}  // namespace

#if defined(GNNSIM_HAVE_AVX2)
namespace avx2 {
extern const Ops kOps;
}
static bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#else
static bool cpu_has_avx2() { return false; }
#endif

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const Ops& ops(Backend b) {
  switch (b) {
    case Backend::scalar:
      return kScalarOps;
#if defined(GNNSIM_HAVE_AVX2)
    case Backend::avx2:
      if (cpu_has_avx2()) return avx2::kOps;
      break;
#else
    case Backend::avx2:
      break;
#endif
  }
  throw std::runtime_error("kernel backend not available on this machine");
}

Backend active_backend() {
  static const Backend picked = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
  return picked;
}

const Ops& active() { return ops(active_backend()); }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "?";
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

float dot(const float* x, const float* y, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

}  // namespace gnnsim::kern
