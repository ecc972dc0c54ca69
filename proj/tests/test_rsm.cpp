// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "resp/rsm.hpp"

using namespace resp;
using rsm::RespiratoryPattern;

TEST_CASE("sample_segment_params with degenerate ranges") {
  rsm::SegmentRule rule;
  rule.amp = {1, 1};
  rule.bpm = {12, 12};
  rule.offset = {0, 0};
  rule.drift = {0, 0};
  rule.duration = {5, 5};
  rsm::Rng rng(1);
  const auto p = rsm::sample_segment_params(rule, rng);
  CHECK(p.amp0 == doctest::Approx(1.0));
  CHECK(p.b == doctest::Approx(2.0 * std::numbers::pi * 12.0 / 60.0));
  CHECK(p.c == 0.0);
  CHECK(p.d == 0.0);
  CHECK(p.duration == doctest::Approx(5.0));
}

TEST_CASE("apnea rule forces zero amplitude") {
  rsm::SegmentRule rule;
  rule.kind = rsm::SegmentKind::Apnea;
  rule.amp = {0.8, 1.2};
  rule.duration = {10, 10};
  rsm::Rng rng(7);
  const auto p = rsm::sample_segment_params(rule, rng);
  CHECK(p.amp0 == 0.0);
  CHECK(p.amp1 == 0.0);
  CHECK(p.b == 0.0);
}

TEST_CASE("sampling is deterministic under seed") {
  rsm::SegmentRule rule;
  rule.amp = {0.5, 1.5};
  rule.bpm = {10, 30};
  rule.offset = {-0.1, 0.1};
  rule.drift = {-0.005, 0.005};
  rule.duration = {5, 20};
  rsm::Rng a(99), b(99);
  const auto p1 = rsm::sample_segment_params(rule, a);
  const auto p2 = rsm::sample_segment_params(rule, b);
  CHECK(p1.amp0 == p2.amp0);
  CHECK(p1.b == p2.b);
  CHECK(p1.c == p2.c);
  CHECK(p1.d == p2.d);
  CHECK(p1.duration == p2.duration);
}

TEST_CASE("render_segment pure sine") {
  rsm::SegmentParams p{1, 1, 1.0, 0, 0, std::numbers::pi / 2.0};
  const auto seg = rsm::render_segment(p, 4.0, 0.0, rsm::natural_start(p, 0.0));
  REQUIRE(seg.samples.size() >= 3);
  CHECK(seg.samples[0] == doctest::Approx(0.0));
  CHECK(seg.samples[1] == doctest::Approx(std::sin(0.25)));
  CHECK(seg.samples[2] == doctest::Approx(std::sin(0.5)));
}

TEST_CASE("render_segment apnea is a drift line") {
  rsm::SegmentParams p{0, 0, 0.0, 0.5, 0.1, 2.0};
  const auto seg = rsm::render_segment(p, 10.0, 0.0, rsm::natural_start(p, 0.0));
  REQUIRE(seg.samples.size() == 20);
  for (std::size_t k = 0; k < seg.samples.size(); ++k)
    CHECK(seg.samples[k] == doctest::Approx(0.5 + 0.1 * static_cast<double>(k) / 10.0));
}

TEST_CASE("render_segment accumulates phase") {
  rsm::SegmentParams p{1, 1, 2.0, 0, 0, 1.0};
  const auto seg = rsm::render_segment(p, 10.0, 0.0, rsm::natural_start(p, 0.0));
  CHECK(seg.phase_end == doctest::Approx(2.0));
}

TEST_CASE("render_segment shifts whole segment to hit value0") {
  rsm::SegmentParams p{1, 1, 1.0, 0.3, 0, 1.0};
  const auto seg = rsm::render_segment(p, 10.0, 0.5, 2.0);
  CHECK(seg.samples[0] == doctest::Approx(2.0));
}

TEST_CASE("stitch single segment is a passthrough") {
  rsm::SegmentParams p{1, 1, 1.0, 0, 0, 1.0};
  const auto seg = rsm::render_segment(p, 10.0, 0.0, 0.0);
  const auto w = rsm::stitch_segments({seg}, 10.0);
  CHECK(w.samples == seg.samples);
}

TEST_CASE("stitch joins flat segments with no jump") {
  rsm::SegmentParams flat0{0, 0, 0.0, 0.0, 0, 1.0};
  rsm::SegmentParams flat1{0, 0, 0.0, 1.0, 0, 1.0};
  const auto s0 = rsm::render_segment(flat0, 10.0, 0.0, 0.0);
  const auto s1 = rsm::render_segment(flat1, 10.0, 0.0, 1.0);
  const auto w = rsm::stitch_segments({s0, s1}, 10.0);
  for (double v : w.samples) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("stitch rejects empty input") {
  CHECK_THROWS(rsm::stitch_segments({}, 10.0));
}

TEST_CASE("breakpoint steps stay close to in-segment steps") {
  // D1 continuity bound: jump at any breakpoint <= 3x the max step inside
  // segments, scanned with the brute-force oracle over all six patterns.
  for (int c = 0; c < rsm::kNumPatterns; ++c) {
    auto tmpl = rsm::default_template(static_cast<RespiratoryPattern>(c));
    tmpl.noise_sigma = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      rsm::Rng rng(seed);
      const auto lw = rsm::generate_waveform(tmpl, rng);
      // the global max step bounds every breakpoint step, so the scan is a
      // conservative check of the join rule
      const double global_max = oracles::max_adjacent_step(lw.waveform.samples);
      // max in-segment step for a sine at rate 10 Hz: a*b/rate upper bound
      double bound = 0.0;
      for (const auto& rule : tmpl.segment_rules) {
        const double b = 2.0 * std::numbers::pi * rule.bpm.hi / 60.0;
        const double step = rule.amp.hi * b / tmpl.sample_rate_hz +
                            std::abs(rule.drift.hi) / tmpl.sample_rate_hz;
        bound = std::max(bound, step);
      }
      CHECK(global_max <= 3.0 * bound + 1e-9);
    }
  }
}

TEST_CASE("gaussian noise: zero sigma is identity, seeded, right scale") {
  rsm::Waveform w;
  w.sample_rate_hz = 10.0;
  w.samples.assign(60000, 1.0);
  rsm::Rng rng(5);
  const auto same = rsm::add_gaussian_noise(w, 0.0, rng);
  CHECK(same.samples == w.samples);

  rsm::Rng r1(5), r2(5);
  const auto n1 = rsm::add_gaussian_noise(w, 0.05, r1);
  const auto n2 = rsm::add_gaussian_noise(w, 0.05, r2);
  CHECK(n1.samples == n2.samples);

  // statistical oracle: sample std of (noisy - clean) within 0.05 +- 0.002
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double d = n1.samples[i] - w.samples[i];
    sum += d;
    sum2 += d * d;
  }
  const double n = static_cast<double>(w.samples.size());
  const double var = (sum2 - sum * sum / n) / (n - 1.0);
  CHECK(std::sqrt(var) == doctest::Approx(0.05).epsilon(0.04));
  CHECK(std::abs(std::sqrt(var) - 0.05) < 0.002);
}

TEST_CASE("generated waveforms have exactly window*rate samples") {
  for (int c = 0; c < rsm::kNumPatterns; ++c) {
    const auto tmpl = rsm::default_template(static_cast<RespiratoryPattern>(c));
    rsm::Rng rng(11);
    const auto lw = rsm::generate_waveform(tmpl, rng);
    CHECK(lw.waveform.samples.size() == 600);
    CHECK(lw.label == static_cast<RespiratoryPattern>(c));
    for (double v : lw.waveform.samples) CHECK(std::isfinite(v));
  }
}

TEST_CASE("generation is bit-deterministic under seed") {
  const auto tmpl = rsm::default_template(RespiratoryPattern::CheyneStokes);
  rsm::Rng a(123), b(123);
  const auto w1 = rsm::generate_waveform(tmpl, a);
  const auto w2 = rsm::generate_waveform(tmpl, b);
  CHECK(w1.waveform.samples == w2.waveform.samples);
}

TEST_CASE("central apnea shows a >=10 s flat run") {
  auto tmpl = rsm::default_template(RespiratoryPattern::CentralApnea);
  tmpl.noise_sigma = 0.0;
  rsm::Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto lw = rsm::generate_waveform(tmpl, rng);
    const auto mask = oracles::apnea_mask(lw.waveform.samples, tmpl.sample_rate_hz);
    CHECK(oracles::longest_run_seconds(mask, tmpl.sample_rate_hz) >= 10.0);
  }
}

TEST_CASE("tachypnea zero-crossing rate sits in its band") {
  auto tmpl = rsm::default_template(RespiratoryPattern::Tachypnea);
  tmpl.noise_sigma = 0.0;
  rsm::Rng rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto lw = rsm::generate_waveform(tmpl, rng);
    const double bpm = oracles::zero_crossing_bpm(lw.waveform.samples, 10.0);
    CHECK(bpm >= 21.0);
    CHECK(bpm <= 35.0);
  }
}

TEST_CASE("dataset respects per-class counts and determinism") {
  const auto templates = rsm::default_templates();
  std::array<std::int64_t, 6> counts{3, 2, 1, 0, 0, 2};
  rsm::Rng a(8), b(8);
  const auto d1 = rsm::generate_dataset(counts, templates, a);
  const auto d2 = rsm::generate_dataset(counts, templates, b);
  REQUIRE(d1.size() == 8);
  std::array<int, 6> seen{};
  for (const auto& lw : d1) ++seen[static_cast<int>(lw.label)];
  CHECK(seen == std::array<int, 6>{3, 2, 1, 0, 0, 2});
  REQUIRE(d1.size() == d2.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    CHECK(d1[i].label == d2[i].label);
    CHECK(d1[i].waveform.samples == d2[i].waveform.samples);
  }

  std::array<std::int64_t, 6> zero{};
  rsm::Rng c(8);
  CHECK(rsm::generate_dataset(zero, templates, c).empty());
}

TEST_CASE("template validation rejects bad ranges") {
  auto tmpl = rsm::default_template(RespiratoryPattern::Eupnea);
  tmpl.segment_rules[0].bpm = {20, 12};
  CHECK_THROWS(tmpl.validate());
  tmpl = rsm::default_template(RespiratoryPattern::Eupnea);
  tmpl.segment_rules[0].duration = {0, 5};
  CHECK_THROWS(tmpl.validate());
  tmpl = rsm::default_template(RespiratoryPattern::Eupnea);
  tmpl.window_seconds = 0;
  CHECK_THROWS(tmpl.validate());
}

TEST_CASE("pattern name round trip and variants") {
  for (int c = 0; c < rsm::kNumPatterns; ++c) {
    const auto p = static_cast<RespiratoryPattern>(c);
    CHECK(rsm::pattern_from_string(rsm::pattern_name(p)) == p);
  }
  CHECK(rsm::pattern_from_string("Cheyne Stokes") == RespiratoryPattern::CheyneStokes);
  CHECK(rsm::pattern_from_string("CENTRAL_APNEA") == RespiratoryPattern::CentralApnea);
  CHECK_THROWS(rsm::pattern_from_string("sighing"));
}
