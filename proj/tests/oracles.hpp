// SPDX-License-Identifier: Apache-2.0
// Test-only oracles, independent of the library implementations they check.
#ifndef RESP_TESTS_ORACLES_HPP
#define RESP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

// brute-force centered mean with symmetric shrinking at the edges
inline std::vector<double> moving_average_brute(const std::vector<double>& x,
                                                std::size_t span) {
  const std::size_t n = x.size(), half = span / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t h = half;
    if (i < h) h = i;
    if (n - 1 - i < h) h = n - 1 - i;
    double acc = 0.0;
    for (std::size_t j = i - h; j <= i + h; ++j) acc += x[j];
    out[i] = acc / static_cast<double>(2 * h + 1);
  }
  return out;
}

inline double max_adjacent_step(const std::vector<double>& x) {
  double mx = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    mx = std::max(mx, std::abs(x[i] - x[i - 1]));
  return mx;
}

// removes baseline/drift with a long centered mean so oscillation remains
inline std::vector<double> detrend(const std::vector<double>& x, std::size_t span) {
  if (span % 2 == 0) ++span;
  const auto trend = moving_average_brute(x, span);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - trend[i];
  return out;
}

// local amplitude: max |detrended| over a centered window
inline std::vector<double> local_amplitude(const std::vector<double>& detrended,
                                           std::size_t window) {
  const std::size_t n = detrended.size(), half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double mx = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) mx = std::max(mx, std::abs(detrended[j]));
    out[i] = mx;
  }
  return out;
}

// true where the signal is locally flat (below frac of the peak amplitude)
inline std::vector<bool> apnea_mask(const std::vector<double>& samples,
                                    double rate_hz, double frac = 0.10) {
  const auto detrended =
      detrend(samples, static_cast<std::size_t>(std::lround(5.0 * rate_hz)) | 1u);
  const auto amp =
      local_amplitude(detrended, static_cast<std::size_t>(std::lround(1.5 * rate_hz)));
  const double peak = *std::max_element(amp.begin(), amp.end());
  std::vector<bool> mask(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) mask[i] = amp[i] < frac * peak;
  return mask;
}

inline double longest_run_seconds(const std::vector<bool>& mask, double rate_hz) {
  std::size_t best = 0, cur = 0;
  for (bool b : mask) {
    cur = b ? cur + 1 : 0;
    best = std::max(best, cur);
  }
  return static_cast<double>(best) / rate_hz;
}

// Breath rate from positive-going zero crossings of the detrended signal,
// measured between the first and last crossing to avoid end quantization.
// When a mask is given, crossings and elapsed time are restricted to
// contiguous unmasked (breathing) regions.
inline double zero_crossing_bpm(const std::vector<double>& samples, double rate_hz,
                                const std::vector<bool>* skip_mask = nullptr) {
  const auto d =
      detrend(samples, static_cast<std::size_t>(std::lround(5.0 * rate_hz)) | 1u);
  double crossing_intervals = 0.0;
  double interval_time = 0.0;
  std::size_t i = 0;
  const std::size_t n = d.size();
  while (i < n) {
    if (skip_mask && (*skip_mask)[i]) { ++i; continue; }
    std::size_t j = i;
    while (j < n && (!skip_mask || !(*skip_mask)[j])) ++j;
    // region [i, j)
    long first = -1, last = -1;
    long count = 0;
    for (std::size_t k = i + 1; k < j; ++k) {
      if (d[k - 1] <= 0.0 && d[k] > 0.0) {
        if (first < 0) first = static_cast<long>(k);
        last = static_cast<long>(k);
        ++count;
      }
    }
    if (count >= 2) {
      crossing_intervals += static_cast<double>(count - 1);
      interval_time += static_cast<double>(last - first) / rate_hz;
    }
    i = j;
  }
  if (interval_time <= 0.0) return 0.0;
  return 60.0 * crossing_intervals / interval_time;
}

// plain per-sample tallying for the metrics oracle
struct BruteMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

inline BruteMetrics brute_metrics(const std::vector<int>& preds,
                                  const std::vector<int>& labels, int classes) {
  BruteMetrics m;
  int correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == labels[i]) ++correct;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  for (int c = 0; c < classes; ++c) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i] == c && labels[i] == c) ++tp;
      if (preds[i] == c && labels[i] != c) ++fp;
      if (preds[i] != c && labels[i] == c) ++fn;
    }
    const double prec = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    m.macro_precision += prec / classes;
    m.macro_recall += rec / classes;
    m.macro_f1 += f1 / classes;
  }
  return m;
}

} // namespace oracles

#endif
