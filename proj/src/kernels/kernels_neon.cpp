// SPDX-License-Identifier: Apache-2.0
// NEON (aarch64) variants; float64x2_t is baseline on aarch64 so no runtime
// probe is needed there.
#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace resp::kernels::neon {

void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      acc = vfmaq_f64(acc, vld1q_f64(row + j), vld1q_f64(x + j));
    double s = vaddvq_f64(acc);
    for (; j < cols; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    const float64x2_t xi = vdupq_n_f64(x[i]);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      vst1q_f64(y + j, vfmaq_f64(vld1q_f64(y + j), vld1q_f64(row + j), xi));
    for (; j < cols; ++j) y[j] += row[j] * x[i];
  }
}

void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = a + i * cols;
    const float64x2_t xi = vdupq_n_f64(x[i]);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      vst1q_f64(row + j, vfmaq_f64(vld1q_f64(row + j), xi, vld1q_f64(y + j)));
    for (; j < cols; ++j) row[j] += x[i] * y[j];
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  // mul+add rather than fma: bit-identical to the scalar backend, which the
  // equivalence tests demand for elementwise ops.
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

} // namespace resp::kernels::neon

#endif // __aarch64__
