// SPDX-License-Identifier: Apache-2.0
// AVX2+FMA variants. Compiled with -mavx2 -mfma; only reached after the
// runtime CPUID probe in kernels.cpp says the ISA is present.
#if defined(__x86_64__)

#include <immintrin.h>

#include <cstddef>

namespace resp::kernels::avx2 {

bool available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

} // namespace

void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
    double s = hsum(acc);
    for (; j < cols; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    const __m256d xi = _mm256_set1_pd(x[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d yy = _mm256_loadu_pd(y + j);
      yy = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), xi, yy);
      _mm256_storeu_pd(y + j, yy);
    }
    for (; j < cols; ++j) y[j] += row[j] * x[i];
  }
}

void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = a + i * cols;
    const __m256d xi = _mm256_set1_pd(x[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d r = _mm256_loadu_pd(row + j);
      r = _mm256_fmadd_pd(xi, _mm256_loadu_pd(y + j), r);
      _mm256_storeu_pd(row + j, r);
    }
    for (; j < cols; ++j) row[j] += x[i] * y[j];
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  // mul+add rather than fmadd: keeps the result bit-identical to the scalar
  // backend, which the equivalence tests demand for elementwise ops.
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yy = _mm256_loadu_pd(y + i);
    yy = _mm256_add_pd(yy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, yy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

} // namespace resp::kernels::avx2

#endif // __x86_64__
