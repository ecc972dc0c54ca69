// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_SIGNAL_HPP
#define RESP_SIGNAL_HPP

#include <cstddef>
#include <vector>

#include "resp/rsm.hpp"

namespace resp::signal {

struct PreprocessConfig {
  std::size_t smooth_span = 5; // odd, >= 1
  std::size_t target_len = 600;
  bool normalize = true;
};

// Centered moving average; at the edges the window shrinks symmetrically
// (spans 1, 3, 5, ... until the full span fits).
std::vector<double> moving_average(const std::vector<double>& samples, std::size_t span);

// (x - min) / (max - min); throws on a constant signal.
std::vector<double> min_max_normalize(const std::vector<double>& samples);

// Linear interpolation onto target_len equally spaced points spanning the
// original duration; endpoints preserved.
std::vector<double> resample_linear(const std::vector<double>& samples,
                                    std::size_t target_len);

// smooth -> resample -> normalize
std::vector<double> preprocess(const rsm::Waveform& waveform, const PreprocessConfig& config);

} // namespace resp::signal

#endif
