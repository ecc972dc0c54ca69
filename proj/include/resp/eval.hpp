// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_EVAL_HPP
#define RESP_EVAL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resp/dataset.hpp"
#include "resp/nn.hpp"
#include "resp/train.hpp"

namespace resp::eval {

inline constexpr int kClasses = 6;

// rows = true class, cols = predicted class
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kClasses>, kClasses> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassMetrics, kClasses> per_class{};
  ConfusionMatrix confusion;
  // classes whose precision or recall had a zero denominator (scored 0)
  std::vector<int> degenerate_classes;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& labels);

// Macro-averaged (unweighted over the 6 classes); zero-denominator classes
// contribute 0 and are listed in degenerate_classes.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

// per-sample prediction record for the JSON-lines export
struct Prediction {
  std::size_t sample_id = 0;
  int label = 0;
  int predicted = 0;
  Vec probs;
};

MetricsReport evaluate(const nn::ModelParams& model,
                       const std::vector<dataset::Sample>& samples,
                       std::vector<Prediction>* predictions = nullptr);

struct ComparisonRow {
  nn::Arch arch;
  MetricsReport metrics;
  train::TrainReport train_report;
  double train_seconds = 0.0;
  nn::ModelParams model; // the trained parameters, for downstream inspection
};

struct ComparisonConfig {
  nn::Dims dims;
  train::TrainConfig train;
  double val_frac = 0.1;
};

// Trains the four architectures on the same data/seed and evaluates each
// on the shared test set.
std::vector<ComparisonRow> run_comparison(const std::vector<dataset::Sample>& train_set,
                                          const std::vector<dataset::Sample>& test_set,
                                          const ComparisonConfig& config);

// "Model Accuracy Precision Recall F1" aligned text table.
std::string format_comparison_table(const std::vector<ComparisonRow>& rows);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string confusion_csv(const ConfusionMatrix& cm);
void write_predictions_jsonl(const std::string& path,
                             const std::vector<Prediction>& predictions);

} // namespace resp::eval

#endif
