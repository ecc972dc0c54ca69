// SPDX-License-Identifier: Apache-2.0
#include "resp/rsm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace resp::rsm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(Rng& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

double wrap_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0) p += kTwoPi;
  return p;
}
} // namespace

const char* pattern_name(RespiratoryPattern p) {
  switch (p) {
    case RespiratoryPattern::Eupnea: return "eupnea";
    case RespiratoryPattern::Bradypnea: return "bradypnea";
    case RespiratoryPattern::Tachypnea: return "tachypnea";
    case RespiratoryPattern::Biots: return "biots";
    case RespiratoryPattern::CheyneStokes: return "cheyne-stokes";
    case RespiratoryPattern::CentralApnea: return "central-apnea";
  }
  throw std::invalid_argument("unknown pattern value");
}

RespiratoryPattern pattern_from_string(const std::string& name) {
  std::string key;
  for (char ch : name) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "eupnea") return RespiratoryPattern::Eupnea;
  if (key == "bradypnea") return RespiratoryPattern::Bradypnea;
  if (key == "tachypnea") return RespiratoryPattern::Tachypnea;
  if (key == "biots") return RespiratoryPattern::Biots;
  if (key == "cheynestokes") return RespiratoryPattern::CheyneStokes;
  if (key == "centralapnea") return RespiratoryPattern::CentralApnea;
  throw std::invalid_argument("unknown respiratory pattern: " + name);
}

void PatternTemplate::validate() const {
  if (segment_rules.empty())
    throw std::invalid_argument("template has no segment rules");
  if (!(window_seconds > 0.0))
    throw std::invalid_argument("window_seconds must be > 0");
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("sample_rate_hz must be > 0");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("noise_sigma must be >= 0");
  for (const auto& rule : segment_rules) {
    auto check = [](const Range& r, const char* what) {
      if (r.lo > r.hi)
        throw std::invalid_argument(std::string("empty range for ") + what);
    };
    check(rule.amp, "amp");
    check(rule.bpm, "bpm");
    check(rule.offset, "offset");
    check(rule.drift, "drift");
    check(rule.duration, "duration");
    if (rule.amp.lo < 0.0) throw std::invalid_argument("amp must be >= 0");
    if (rule.bpm.lo < 0.0) throw std::invalid_argument("bpm must be >= 0");
    if (!(rule.duration.lo > 0.0))
      throw std::invalid_argument("duration must be > 0");
    if (rule.duration_in_breaths && !(rule.bpm.lo > 0.0))
      throw std::invalid_argument("duration_in_breaths needs bpm > 0");
  }
}

PatternTemplate default_template(RespiratoryPattern p) {
  const Range offset{-0.1, 0.1};
  const Range drift{-0.005, 0.005};

  auto breathing = [&](Range bpm, Range amp, Range dur) {
    return SegmentRule{SegmentKind::Breathing, amp, bpm, offset, drift, dur, false};
  };
  auto apnea = [&](Range dur) {
    return SegmentRule{SegmentKind::Apnea, Range{0, 0}, Range{0, 0}, offset, drift, dur, false};
  };

  PatternTemplate t;
  t.pattern = p;
  switch (p) {
    case RespiratoryPattern::Eupnea:
      t.segment_rules = {breathing({12, 20}, {0.8, 1.2}, {8, 15})};
      break;
    case RespiratoryPattern::Bradypnea:
      t.segment_rules = {breathing({5, 11}, {0.8, 1.2}, {8, 15})};
      break;
    case RespiratoryPattern::Tachypnea:
      t.segment_rules = {breathing({21, 35}, {0.4, 1.0}, {8, 15})};
      break;
    case RespiratoryPattern::Biots: {
      SegmentRule burst = breathing({14, 25}, {0.8, 1.2}, {3, 6});
      burst.duration_in_breaths = true;
      t.segment_rules = {burst, apnea({14, 25})};
      break;
    }
    case RespiratoryPattern::CheyneStokes: {
      // Apnea leads the cycle so a full pause always lands inside a 60 s
      // window; crescendo ramps 0.1 -> 1.0, decrescendo the reverse.
      SegmentRule up{SegmentKind::Crescendo, {0.1, 1.0}, {15, 25}, offset, drift, {12, 20}, false};
      SegmentRule down = up;
      down.kind = SegmentKind::Decrescendo;
      t.segment_rules = {apnea({14, 20}), up, down};
      break;
    }
    case RespiratoryPattern::CentralApnea:
      t.segment_rules = {breathing({12, 20}, {0.8, 1.2}, {15, 25}), apnea({14, 30})};
      break;
  }
  t.validate();
  return t;
}

std::array<PatternTemplate, kNumPatterns> default_templates() {
  std::array<PatternTemplate, kNumPatterns> out;
  for (int i = 0; i < kNumPatterns; ++i)
    out[i] = default_template(static_cast<RespiratoryPattern>(i));
  return out;
}

SegmentParams sample_segment_params(const SegmentRule& rule, Rng& rng) {
  SegmentParams p;
  const double amp = uniform(rng, rule.amp);
  const double bpm = uniform(rng, rule.bpm);
  p.b = kTwoPi * bpm / 60.0;
  p.c = uniform(rng, rule.offset);
  p.d = uniform(rng, rule.drift);
  p.duration = uniform(rng, rule.duration);
  if (rule.duration_in_breaths) p.duration *= 60.0 / bpm;
  switch (rule.kind) {
    case SegmentKind::Breathing:
      p.amp0 = p.amp1 = amp;
      break;
    case SegmentKind::Apnea:
      p.amp0 = p.amp1 = 0.0;
      p.b = 0.0;
      break;
    case SegmentKind::Crescendo:
      p.amp0 = rule.amp.lo;
      p.amp1 = rule.amp.hi;
      break;
    case SegmentKind::Decrescendo:
      p.amp0 = rule.amp.hi;
      p.amp1 = rule.amp.lo;
      break;
  }
  return p;
}

double natural_start(const SegmentParams& params, double phase0) {
  return params.amp0 * std::sin(phase0) + params.c;
}

RenderedSegment render_segment(const SegmentParams& params, double sample_rate_hz,
                               double phase0, double value0) {
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("sample_rate_hz must be > 0");
  const auto n = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(params.duration * sample_rate_hz)));
  const double shift = value0 - natural_start(params, phase0);
  const double dt = 1.0 / sample_rate_hz;

  RenderedSegment out;
  out.samples.resize(n);
  auto amp_at = [&](double t) {
    if (params.duration <= 0.0) return params.amp0;
    const double u = std::clamp(t / params.duration, 0.0, 1.0);
    return params.amp0 + (params.amp1 - params.amp0) * u;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.samples[k] =
        amp_at(t) * std::sin(params.b * t + phase0) + params.c + params.d * t + shift;
  }
  // End state at t = n*dt keeps the global sample grid uniform across joins.
  const double t_end = static_cast<double>(n) * dt;
  out.phase_end = wrap_phase(phase0 + params.b * t_end);
  out.value_end =
      amp_at(t_end) * std::sin(params.b * t_end + phase0) + params.c + params.d * t_end + shift;
  return out;
}

Waveform stitch_segments(const std::vector<RenderedSegment>& segments,
                         double sample_rate_hz) {
  if (segments.empty()) throw std::invalid_argument("no segments");
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  double join_value = segments.front().samples.front();
  for (const auto& seg : segments) {
    const double shift = join_value - seg.samples.front();
    for (double s : seg.samples) w.samples.push_back(s + shift);
    join_value = seg.value_end + shift;
  }
  return w;
}

Waveform add_gaussian_noise(const Waveform& w, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  Waveform out = w;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& s : out.samples) s += noise(rng);
  return out;
}

LabeledWaveform generate_waveform(const PatternTemplate& tmpl, Rng& rng) {
  tmpl.validate();
  const auto target = static_cast<std::size_t>(
      std::llround(tmpl.window_seconds * tmpl.sample_rate_hz));

  std::vector<RenderedSegment> segments;
  double phase = 0.0;
  std::size_t total = 0;
  double amp_sum = 0.0;
  std::size_t amp_count = 0;
  for (std::size_t rule_idx = 0; total < target; ++rule_idx) {
    const auto& rule = tmpl.segment_rules[rule_idx % tmpl.segment_rules.size()];
    const SegmentParams params = sample_segment_params(rule, rng);
    RenderedSegment seg =
        render_segment(params, tmpl.sample_rate_hz, phase, natural_start(params, phase));
    phase = seg.phase_end;
    total += seg.samples.size();
    segments.push_back(std::move(seg));
    if (rule.kind != SegmentKind::Apnea) {
      amp_sum += 0.5 * (params.amp0 + params.amp1);
      ++amp_count;
    }
  }

  Waveform w = stitch_segments(segments, tmpl.sample_rate_hz);
  w.samples.resize(target);

  const double mean_amp = amp_count > 0 ? amp_sum / static_cast<double>(amp_count) : 1.0;
  w = add_gaussian_noise(w, tmpl.noise_sigma * mean_amp, rng);

  return LabeledWaveform{std::move(w), tmpl.pattern};
}

std::vector<LabeledWaveform> generate_dataset(
    const std::array<std::int64_t, kNumPatterns>& counts,
    const std::array<PatternTemplate, kNumPatterns>& templates, Rng& rng) {
  std::vector<LabeledWaveform> out;
  for (int c = 0; c < kNumPatterns; ++c) {
    if (counts[c] < 0) throw std::invalid_argument("counts must be >= 0");
    for (std::int64_t k = 0; k < counts[c]; ++k)
      out.push_back(generate_waveform(templates[c], rng));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

namespace {

Range parse_range(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream ss(v);
  Range r;
  if (!(ss >> r.lo)) throw std::invalid_argument("bad range: " + value);
  if (!(ss >> r.hi)) r.hi = r.lo;
  return r;
}

SegmentKind parse_kind(const std::string& value) {
  if (value == "breathing") return SegmentKind::Breathing;
  if (value == "apnea") return SegmentKind::Apnea;
  if (value == "crescendo") return SegmentKind::Crescendo;
  if (value == "decrescendo") return SegmentKind::Decrescendo;
  throw std::invalid_argument("unknown segment kind: " + value);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

void load_template_overrides(const std::string& path,
                             std::array<PatternTemplate, kNumPatterns>& templates) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template config: " + path);

  PatternTemplate* tmpl = nullptr;
  SegmentRule* rule = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      std::string section = line.substr(1, line.size() - 2);
      std::string rule_part;
      if (auto dot = section.find('.'); dot != std::string::npos) {
        rule_part = section.substr(dot + 1);
        section = section.substr(0, dot);
      }
      tmpl = &templates[static_cast<int>(pattern_from_string(section))];
      rule = nullptr;
      if (!rule_part.empty()) {
        if (rule_part.rfind("rule", 0) != 0) fail("expected ruleN subsection");
        const std::size_t idx = std::stoul(rule_part.substr(4));
        if (idx > tmpl->segment_rules.size()) fail("rule index out of order");
        if (idx == tmpl->segment_rules.size()) tmpl->segment_rules.emplace_back();
        rule = &tmpl->segment_rules[idx];
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key=value");
    if (!tmpl) fail("key before any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (rule) {
      if (key == "kind") rule->kind = parse_kind(value);
      else if (key == "amp") rule->amp = parse_range(value);
      else if (key == "bpm") rule->bpm = parse_range(value);
      else if (key == "offset") rule->offset = parse_range(value);
      else if (key == "drift") rule->drift = parse_range(value);
      else if (key == "duration") rule->duration = parse_range(value);
      else if (key == "duration_in_breaths") rule->duration_in_breaths = (value == "true" || value == "1");
      else fail("unknown rule key: " + key);
    } else {
      if (key == "noise_sigma") tmpl->noise_sigma = std::stod(value);
      else if (key == "window_seconds") tmpl->window_seconds = std::stod(value);
      else if (key == "sample_rate_hz") tmpl->sample_rate_hz = std::stod(value);
      else fail("unknown template key: " + key);
    }
  }
  for (auto& t : templates) t.validate();
}

} // namespace resp::rsm
