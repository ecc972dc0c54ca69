// SPDX-License-Identifier: Apache-2.0
#include "resp/kernels.hpp"

namespace resp::kernels {

namespace scalar {

void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = a + i * cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < cols; ++j) row[j] += xi * y[j];
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

} // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
bool available();
void gemv_acc(const double*, std::size_t, std::size_t, const double*, double*);
void gemv_t_acc(const double*, std::size_t, std::size_t, const double*, double*);
void ger_acc(double*, std::size_t, std::size_t, const double*, const double*);
void axpy(std::size_t, double, const double*, double*);
double dot(std::size_t, const double*, const double*);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void gemv_acc(const double*, std::size_t, std::size_t, const double*, double*);
void gemv_t_acc(const double*, std::size_t, std::size_t, const double*, double*);
void ger_acc(double*, std::size_t, std::size_t, const double*, const double*);
void axpy(std::size_t, double, const double*, double*);
double dot(std::size_t, const double*, const double*);
} // namespace neon
#endif

namespace {

struct Vtable {
  void (*gemv_acc)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*gemv_t_acc)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*ger_acc)(double*, std::size_t, std::size_t, const double*, const double*);
  void (*axpy)(std::size_t, double, const double*, double*);
  double (*dot)(std::size_t, const double*, const double*);
  Backend id;
};

constexpr Vtable kScalar{scalar::gemv_acc, scalar::gemv_t_acc, scalar::ger_acc,
                         scalar::axpy, scalar::dot, Backend::Scalar};

Vtable probe() {
#if defined(__x86_64__)
  if (avx2::available())
    return Vtable{avx2::gemv_acc, avx2::gemv_t_acc, avx2::ger_acc,
                  avx2::axpy, avx2::dot, Backend::Avx2};
#endif
#if defined(__aarch64__)
  return Vtable{neon::gemv_acc, neon::gemv_t_acc, neon::ger_acc,
                neon::axpy, neon::dot, Backend::Neon};
#endif
  return kScalar;
}

Vtable g_vt = probe();

} // namespace

void set_backend(Backend b) {
  switch (b) {
    case Backend::Auto: g_vt = probe(); break;
    case Backend::Scalar: g_vt = kScalar; break;
    case Backend::Avx2:
#if defined(__x86_64__)
      if (avx2::available()) {
        g_vt = Vtable{avx2::gemv_acc, avx2::gemv_t_acc, avx2::ger_acc,
                      avx2::axpy, avx2::dot, Backend::Avx2};
        return;
      }
#endif
      g_vt = kScalar;
      break;
    case Backend::Neon:
#if defined(__aarch64__)
      g_vt = Vtable{neon::gemv_acc, neon::gemv_t_acc, neon::ger_acc,
                    neon::axpy, neon::dot, Backend::Neon};
#else
      g_vt = kScalar;
#endif
      break;
  }
}

Backend active_backend() { return g_vt.id; }

const char* backend_name() {
  switch (g_vt.id) {
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    default: return "scalar";
  }
}

void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  g_vt.gemv_acc(a, rows, cols, x, y);
}
void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  g_vt.gemv_t_acc(a, rows, cols, x, y);
}
void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y) {
  g_vt.ger_acc(a, rows, cols, x, y);
}
void axpy(std::size_t n, double alpha, const double* x, double* y) {
  g_vt.axpy(n, alpha, x, y);
}
double dot(std::size_t n, const double* x, const double* y) {
  return g_vt.dot(n, x, y);
}

} // namespace resp::kernels
