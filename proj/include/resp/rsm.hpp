// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_RSM_HPP
#define RESP_RSM_HPP

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace resp::rsm {

using Rng = std::mt19937_64;

// Class order is fixed; the index is the one-hot position everywhere.
enum class RespiratoryPattern : int {
  Eupnea = 0,
  Bradypnea = 1,
  Tachypnea = 2,
  Biots = 3,
  CheyneStokes = 4,
  CentralApnea = 5,
};
inline constexpr int kNumPatterns = 6;

const char* pattern_name(RespiratoryPattern p);
// Accepts case-insensitive names with '-', '_' or ' ' variants
// ("cheyne-stokes", "Cheyne Stokes", "cheynestokes").
RespiratoryPattern pattern_from_string(const std::string& name);

enum class SegmentKind { Breathing, Apnea, Crescendo, Decrescendo };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Randomization ranges for one partial waveform. bpm is breaths per minute
// and is converted to rad/s when sampled. When duration_in_breaths is set,
// `duration` is a breath count and the segment lasts count * 60 / bpm s.
struct SegmentRule {
  SegmentKind kind = SegmentKind::Breathing;
  Range amp{1.0, 1.0};
  Range bpm{0.0, 0.0};
  Range offset{0.0, 0.0};
  Range drift{0.0, 0.0};
  Range duration{1.0, 1.0};
  bool duration_in_breaths = false;
};

// One concrete segment of y = a(t) sin(b t + phase) + c + d t. amp0/amp1
// are the amplitude at the segment's start and end; equal for plain
// breathing, 0 for apnea, and a linear ramp for crescendo/decrescendo.
struct SegmentParams {
  double amp0 = 0.0;
  double amp1 = 0.0;
  double b = 0.0; // angular frequency, rad/s
  double c = 0.0; // longitudinal offset
  double d = 0.0; // drift slope, units/s
  double duration = 0.0; // seconds
};

struct PatternTemplate {
  RespiratoryPattern pattern = RespiratoryPattern::Eupnea;
  std::vector<SegmentRule> segment_rules; // cycled in order until the window fills
  double noise_sigma = 0.03; // fraction of mean breathing amplitude
  double window_seconds = 60.0;
  double sample_rate_hz = 10.0;

  void validate() const; // throws std::invalid_argument on bad ranges
};

struct Waveform {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
};

struct LabeledWaveform {
  Waveform waveform;
  RespiratoryPattern label = RespiratoryPattern::Eupnea;
};

struct RenderedSegment {
  std::vector<double> samples;
  double phase_end = 0.0; // wrapped to [0, 2*pi)
  double value_end = 0.0; // value at t = n/rate, for C0 joining
};

// The per-pattern defaults (clinical rate bands; Biots bursts of 3-6
// breaths between 10-25 s apneas; Cheyne-Stokes apnea then crescendo then
// decrescendo; Central-Apnea eupneic breathing with 10-30 s pauses).
PatternTemplate default_template(RespiratoryPattern p);
std::array<PatternTemplate, kNumPatterns> default_templates();

// Applies overrides from an INI-style config file on top of the given
// templates. Sections: [eupnea] for scalars (noise_sigma, window_seconds,
// sample_rate_hz), [eupnea.rule0] for per-rule ranges (amp, bpm, offset,
// drift, duration as "lo,hi"; kind; duration_in_breaths).
void load_template_overrides(const std::string& path,
                             std::array<PatternTemplate, kNumPatterns>& templates);

SegmentParams sample_segment_params(const SegmentRule& rule, Rng& rng);

// Renders one segment at sample_rate_hz. The whole segment is shifted so
// samples[0] == value0; t_k = k / rate over [0, duration).
RenderedSegment render_segment(const SegmentParams& params, double sample_rate_hz,
                               double phase0, double value0);

// Start value of a segment with no shift applied (amp0*sin(phase0) + c).
double natural_start(const SegmentParams& params, double phase0);

// Concatenates segments, shifting each so its first sample equals the
// previous segment's end value (C0 continuity).
Waveform stitch_segments(const std::vector<RenderedSegment>& segments,
                         double sample_rate_hz);

Waveform add_gaussian_noise(const Waveform& w, double sigma, Rng& rng);

LabeledWaveform generate_waveform(const PatternTemplate& tmpl, Rng& rng);

// counts[k] waveforms of class k, deterministically shuffled.
std::vector<LabeledWaveform> generate_dataset(
    const std::array<std::int64_t, kNumPatterns>& counts,
    const std::array<PatternTemplate, kNumPatterns>& templates, Rng& rng);

} // namespace resp::rsm

#endif
