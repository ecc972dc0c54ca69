// SPDX-License-Identifier: Apache-2.0
#include "resp/signal.hpp"

#include <algorithm>
#include <stdexcept>

namespace resp::signal {

std::vector<double> moving_average(const std::vector<double>& samples, std::size_t span) {
  const std::size_t n = samples.size();
  if (span % 2 == 0) throw std::invalid_argument("smoothing span must be odd");
  if (span < 1 || span > n) throw std::invalid_argument("smoothing span exceeds signal length");
  const std::size_t half = span / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    double acc = 0.0;
    for (std::size_t j = i - h; j <= i + h; ++j) acc += samples[j];
    out[i] = acc / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<double> min_max_normalize(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("empty signal");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw std::invalid_argument("degenerate signal");
  std::vector<double> out(samples.size());
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = (samples[i] - lo) * inv;
  return out;
}

std::vector<double> resample_linear(const std::vector<double>& samples,
                                    std::size_t target_len) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("need at least 2 samples to resample");
  if (target_len < 2) throw std::invalid_argument("target_len must be >= 2");
  if (target_len == n) return samples;
  std::vector<double> out(target_len);
  const double step = static_cast<double>(n - 1) / static_cast<double>(target_len - 1);
  for (std::size_t k = 0; k < target_len; ++k) {
    const double pos = static_cast<double>(k) * step;
    auto i = static_cast<std::size_t>(pos);
    if (i >= n - 1) {
      out[k] = samples[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(i);
    out[k] = samples[i] + frac * (samples[i + 1] - samples[i]);
  }
  return out;
}

std::vector<double> preprocess(const rsm::Waveform& waveform, const PreprocessConfig& config) {
  std::vector<double> x = moving_average(waveform.samples, config.smooth_span);
  x = resample_linear(x, config.target_len);
  if (config.normalize) x = min_max_normalize(x);
  return x;
}

} // namespace resp::signal
