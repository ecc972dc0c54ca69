// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_MAT_HPP
#define RESP_MAT_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace resp {

using Vec = std::vector<double>;

// Dense row-major matrix. rows==0 means "not present" (unused model parts).
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool empty() const { return data.empty(); }
  std::size_t size() const { return data.size(); }

  bool operator==(const Mat&) const = default;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

} // namespace resp

#endif
