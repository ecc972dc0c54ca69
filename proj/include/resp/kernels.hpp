// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_KERNELS_HPP
#define RESP_KERNELS_HPP

#include <cstddef>

// Dense double-precision inner loops used by the recurrent cells and the
// optimizer. Every kernel has a scalar reference implementation and, where
// the ISA allows, a SIMD variant (AVX2+FMA on x86-64, NEON on aarch64).
// The backend is picked once at startup from CPUID and can be forced for
// equivalence testing.
namespace resp::kernels {

enum class Backend { Auto, Scalar, Avx2, Neon };

// Force a backend. Auto re-probes the CPU. Forcing Avx2/Neon on a machine
// without the ISA is rejected (falls back to Scalar).
void set_backend(Backend b);
Backend active_backend();
const char* backend_name();

// y += A x, A row-major (rows x cols), x: cols, y: rows
void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y);

// y += A^T x, A row-major (rows x cols), x: rows, y: cols
void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y);

// A += x y^T, A row-major (rows x cols), x: rows, y: cols
void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y);

// y += alpha * x
void axpy(std::size_t n, double alpha, const double* x, double* y);

double dot(std::size_t n, const double* x, const double* y);

// Scalar reference path, always available; the equivalence tests compare
// the dispatched kernels against these.
namespace scalar {
void gemv_acc(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y);
void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y);
void ger_acc(double* a, std::size_t rows, std::size_t cols,
             const double* x, const double* y);
void axpy(std::size_t n, double alpha, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
} // namespace scalar

} // namespace resp::kernels

#endif
