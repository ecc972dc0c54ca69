// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "resp/kernels.hpp"

using namespace resp;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

} // namespace

TEST_CASE("scalar gemv_acc against a hand case") {
  // [1 2; 3 4] * [5, 6] = [17, 39]
  const std::vector<double> a{1, 2, 3, 4}, x{5, 6};
  std::vector<double> y{1, 1};
  kernels::scalar::gemv_acc(a.data(), 2, 2, x.data(), y.data());
  CHECK(y[0] == doctest::Approx(18.0));
  CHECK(y[1] == doctest::Approx(40.0));
}

TEST_CASE("scalar gemv_t_acc against a hand case") {
  const std::vector<double> a{1, 2, 3, 4}, x{5, 6};
  std::vector<double> y{0, 0};
  kernels::scalar::gemv_t_acc(a.data(), 2, 2, x.data(), y.data());
  // A^T x = [1*5+3*6, 2*5+4*6] = [23, 34]
  CHECK(y[0] == doctest::Approx(23.0));
  CHECK(y[1] == doctest::Approx(34.0));
}

TEST_CASE("scalar ger_acc rank-1 update") {
  std::vector<double> a(4, 0.0);
  const std::vector<double> x{1, 2}, y{3, 4};
  kernels::scalar::ger_acc(a.data(), 2, 2, x.data(), y.data());
  CHECK(a == std::vector<double>{3, 4, 6, 8});
}

TEST_CASE("dispatched kernels match scalar reference") {
  // The point of the runtime dispatch: whatever backend probe() picked on
  // this machine must agree with the scalar path to rounding error.
  INFO("active backend: ", kernels::backend_name());
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> size_dist(1, 37);
    const std::size_t rows = size_dist(rng), cols = size_dist(rng);
    const auto a = random_vec(rows * cols, rng);
    const auto x = random_vec(cols, rng);
    const auto xr = random_vec(rows, rng);

    std::vector<double> y1(rows, 0.5), y2(rows, 0.5);
    kernels::gemv_acc(a.data(), rows, cols, x.data(), y1.data());
    kernels::scalar::gemv_acc(a.data(), rows, cols, x.data(), y2.data());
    for (std::size_t i = 0; i < rows; ++i)
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));

    std::vector<double> t1(cols, -0.25), t2(cols, -0.25);
    kernels::gemv_t_acc(a.data(), rows, cols, xr.data(), t1.data());
    kernels::scalar::gemv_t_acc(a.data(), rows, cols, xr.data(), t2.data());
    for (std::size_t j = 0; j < cols; ++j)
      CHECK(t1[j] == doctest::Approx(t2[j]).epsilon(1e-12));

    std::vector<double> a1 = a, a2 = a;
    kernels::ger_acc(a1.data(), rows, cols, xr.data(), x.data());
    kernels::scalar::ger_acc(a2.data(), rows, cols, xr.data(), x.data());
    for (std::size_t k = 0; k < a1.size(); ++k)
      CHECK(a1[k] == doctest::Approx(a2[k]).epsilon(1e-12));

    std::vector<double> v1 = xr, v2 = xr;
    kernels::axpy(rows, 1.75, xr.data(), v1.data());
    kernels::scalar::axpy(rows, 1.75, xr.data(), v2.data());
    CHECK(v1 == v2);

    const double d1 = kernels::dot(cols, x.data(), x.data());
    const double d2 = kernels::scalar::dot(cols, x.data(), x.data());
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
  }
}

TEST_CASE("forcing the scalar backend takes effect") {
  const auto before = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  kernels::set_backend(kernels::Backend::Auto);
  CHECK(kernels::active_backend() == before);
}
