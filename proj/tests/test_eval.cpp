// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "resp/eval.hpp"

using namespace resp;

TEST_CASE("confusion_matrix basics") {
  // perfect predictions -> diagonal
  std::vector<int> labels{0, 1, 2, 3, 4, 5, 2, 2};
  auto cm = eval::confusion_matrix(labels, labels);
  CHECK(cm.trace() == 8);
  CHECK(cm.total() == 8);

  CHECK_THROWS(eval::confusion_matrix({}, {}));
  CHECK_THROWS(eval::confusion_matrix({0, 1}, {0}));
  CHECK_THROWS(eval::confusion_matrix({0, 6}, {0, 0}));
  CHECK_THROWS(eval::confusion_matrix({0, -1}, {0, 0}));
}

TEST_CASE("confusion_matrix three-sample hand tally") {
  // true 1 -> pred 1; true 1 -> pred 4; true 3 -> pred 3
  const auto cm = eval::confusion_matrix({1, 4, 3}, {1, 1, 3});
  CHECK(cm.counts[1][1] == 1);
  CHECK(cm.counts[1][4] == 1);
  CHECK(cm.counts[3][3] == 1);
  CHECK(cm.total() == 3);
  for (int t = 0; t < 6; ++t)
    for (int p = 0; p < 6; ++p)
      if (!((t == 1 && p == 1) || (t == 1 && p == 4) || (t == 3 && p == 3)))
        CHECK(cm.counts[t][p] == 0);
}

TEST_CASE("compute_metrics: perfect diagonal gives all ones") {
  eval::ConfusionMatrix cm;
  for (int c = 0; c < 6; ++c) cm.counts[c][c] = 10;
  const auto rep = eval::compute_metrics(cm);
  CHECK(rep.accuracy == doctest::Approx(1.0));
  CHECK(rep.macro_precision == doctest::Approx(1.0));
  CHECK(rep.macro_recall == doctest::Approx(1.0));
  CHECK(rep.macro_f1 == doctest::Approx(1.0));
}

TEST_CASE("compute_metrics: two-class hand case embedded in six") {
  // rows = true: [[2,1],[0,3]] for classes 0/1
  eval::ConfusionMatrix cm;
  cm.counts[0][0] = 2;
  cm.counts[0][1] = 1;
  cm.counts[1][1] = 3;
  const auto rep = eval::compute_metrics(cm);
  CHECK(rep.accuracy == doctest::Approx(5.0 / 6.0));
  // class 0: precision 1.0, recall 2/3; class 1: precision 0.75, recall 1
  CHECK(rep.per_class[0].precision == doctest::Approx(1.0));
  CHECK(rep.per_class[0].recall == doctest::Approx(2.0 / 3.0));
  CHECK(rep.per_class[1].precision == doctest::Approx(0.75));
  CHECK(rep.per_class[1].recall == doctest::Approx(1.0));
  // macro over the two populated classes alone
  CHECK(rep.per_class[0].precision + rep.per_class[1].precision ==
        doctest::Approx(2 * 0.875));
  CHECK(rep.per_class[0].recall + rep.per_class[1].recall ==
        doctest::Approx(2 * 5.0 / 6.0));
  // empty classes score 0 and are reported
  CHECK(rep.degenerate_classes.size() == 4);
}

TEST_CASE("all predictions one class") {
  std::vector<int> labels{0, 1, 2, 3, 4, 5};
  std::vector<int> preds(6, 2);
  const auto rep = eval::compute_metrics(eval::confusion_matrix(preds, labels));
  CHECK(rep.per_class[2].recall == doctest::Approx(1.0));
  for (int c : {0, 1, 3, 4, 5}) CHECK(rep.per_class[c].recall == doctest::Approx(0.0));
}

TEST_CASE("metrics match the brute-force oracle on random inputs") {
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<int> cls(0, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<std::size_t> len(1, 60);
    const std::size_t n = len(rng);
    std::vector<int> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = cls(rng);
      labels[i] = cls(rng);
    }
    const auto rep = eval::compute_metrics(eval::confusion_matrix(preds, labels));
    const auto want = oracles::brute_metrics(preds, labels, 6);
    CHECK(rep.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
    CHECK(rep.macro_precision == doctest::Approx(want.macro_precision).epsilon(1e-12));
    CHECK(rep.macro_recall == doctest::Approx(want.macro_recall).epsilon(1e-12));
    CHECK(rep.macro_f1 == doctest::Approx(want.macro_f1).epsilon(1e-12));

    // macro F1 lies between min and max per-class F1
    double lo = 1e9, hi = -1e9;
    for (const auto& m : rep.per_class) {
      lo = std::min(lo, m.f1);
      hi = std::max(hi, m.f1);
    }
    CHECK(rep.macro_f1 >= lo - 1e-12);
    CHECK(rep.macro_f1 <= hi + 1e-12);
  }
}

TEST_CASE("permuting sample order leaves metrics unchanged") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> cls(0, 5);
  std::vector<int> preds(100), labels(100);
  for (std::size_t i = 0; i < 100; ++i) {
    preds[i] = cls(rng);
    labels[i] = cls(rng);
  }
  const auto rep1 = eval::compute_metrics(eval::confusion_matrix(preds, labels));
  std::vector<std::size_t> order(100);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> p2(100), l2(100);
  for (std::size_t i = 0; i < 100; ++i) {
    p2[i] = preds[order[i]];
    l2[i] = labels[order[i]];
  }
  const auto rep2 = eval::compute_metrics(eval::confusion_matrix(p2, l2));
  CHECK(rep1.accuracy == rep2.accuracy);
  CHECK(rep1.macro_f1 == rep2.macro_f1);
  CHECK(rep1.confusion.counts == rep2.confusion.counts);
}

TEST_CASE("F1 follows the harmonic-mean convention") {
  // F1(94.4, 95.1) ~ 94.75
  const double p = 0.944, r = 0.951;
  const double f1 = 2 * p * r / (p + r);
  CHECK(f1 == doctest::Approx(0.9475).epsilon(1e-4));
}

TEST_CASE("evaluate: zero-weight model predicts class 0 everywhere") {
  std::mt19937_64 rng(6);
  auto model = nn::init_params(nn::Arch::Gru, nn::Dims{1, 4, 0, 6}, rng);
  model = nn::zeros_like(model);
  std::vector<dataset::Sample> samples;
  std::uniform_real_distribution<double> dist(0, 1);
  for (int c = 0; c < 6; ++c)
    for (int k = 0; k < 4; ++k) {
      dataset::Sample s;
      s.label = c;
      s.features.resize(30);
      for (double& v : s.features) v = dist(rng);
      samples.push_back(std::move(s));
    }
  std::vector<eval::Prediction> preds;
  const auto rep = eval::evaluate(model, samples, &preds);
  // uniform probs, ties break to the lowest index -> always class 0
  for (const auto& p : preds) CHECK(p.predicted == 0);
  CHECK(rep.accuracy == doctest::Approx(4.0 / 24.0));
  CHECK(rep.accuracy ==
        doctest::Approx(static_cast<double>(rep.confusion.trace()) /
                        static_cast<double>(rep.confusion.total())));
}

TEST_CASE("comparison table formatting") {
  std::vector<eval::ComparisonRow> rows;
  for (nn::Arch a : {nn::Arch::Gru, nn::Arch::Lstm, nn::Arch::BiAtGru, nn::Arch::BiAtLstm}) {
    eval::ComparisonRow row;
    row.arch = a;
    row.metrics.accuracy = 0.9;
    row.metrics.macro_precision = 0.91;
    row.metrics.macro_recall = 0.92;
    row.metrics.macro_f1 = 0.915;
    rows.push_back(row);
  }
  const auto table = eval::format_comparison_table(rows);
  CHECK(table.find("Model") != std::string::npos);
  CHECK(table.find("Accuracy") != std::string::npos);
  CHECK(table.find("Precision") != std::string::npos);
  CHECK(table.find("Recall") != std::string::npos);
  CHECK(table.find("F1") != std::string::npos);
  CHECK(table.find("BI-AT-GRU") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 5); // header + 4 rows

  const auto csv = eval::comparison_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
