// SPDX-License-Identifier: Apache-2.0
#include "resp/eval.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "resp/rsm.hpp"

namespace resp::eval {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts)
    for (std::int64_t v : row) n += v;
  return n;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t n = 0;
  for (int i = 0; i < kClasses; ++i) n += counts[i][i];
  return n;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("predictions/labels length mismatch");
  if (predictions.empty()) throw std::invalid_argument("empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int t = labels[i], p = predictions[i];
    if (t < 0 || t >= kClasses || p < 0 || p >= kClasses)
      throw std::invalid_argument("class index out of range");
    ++cm.counts[t][p];
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total <= 0) throw std::invalid_argument("empty confusion matrix");

  MetricsReport rep;
  rep.confusion = cm;
  rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

  for (int c = 0; c < kClasses; ++c) {
    std::int64_t col_sum = 0, row_sum = 0;
    for (int k = 0; k < kClasses; ++k) {
      col_sum += cm.counts[k][c];
      row_sum += cm.counts[c][k];
    }
    const auto diag = static_cast<double>(cm.counts[c][c]);
    ClassMetrics m;
    bool degenerate = false;
    if (col_sum > 0) m.precision = diag / static_cast<double>(col_sum);
    else degenerate = true;
    if (row_sum > 0) m.recall = diag / static_cast<double>(row_sum);
    else degenerate = true;
    if (m.precision + m.recall > 0.0)
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    if (degenerate) rep.degenerate_classes.push_back(c);
    rep.per_class[c] = m;
    rep.macro_precision += m.precision;
    rep.macro_recall += m.recall;
    rep.macro_f1 += m.f1;
  }
  rep.macro_precision /= kClasses;
  rep.macro_recall /= kClasses;
  rep.macro_f1 /= kClasses;
  for (int c : rep.degenerate_classes)
    std::fprintf(stderr, "warning: class %d absent from predictions or labels; scored 0\n", c);
  return rep;
}

MetricsReport evaluate(const nn::ModelParams& model,
                       const std::vector<dataset::Sample>& samples,
                       std::vector<Prediction>* predictions) {
  if (samples.empty()) throw std::invalid_argument("empty evaluation set");
  nn::ForwardCache cache;
  std::vector<int> preds, labels;
  preds.reserve(samples.size());
  labels.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Mat feats(samples[i].features.size(), 1);
    feats.data = samples[i].features;
    const Vec& probs = nn::forward(model, feats, cache);
    // argmax, ties toward the lowest class index
    int best = 0;
    for (std::size_t k = 1; k < probs.size(); ++k)
      if (probs[k] > probs[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    preds.push_back(best);
    labels.push_back(samples[i].label);
    if (predictions)
      predictions->push_back(Prediction{i, samples[i].label, best, probs});
  }
  return compute_metrics(confusion_matrix(preds, labels));
}

std::vector<ComparisonRow> run_comparison(const std::vector<dataset::Sample>& train_set,
                                          const std::vector<dataset::Sample>& test_set,
                                          const ComparisonConfig& config) {
  std::vector<dataset::Sample> tr, val;
  train::split_train_val(train_set, config.val_frac, config.train.seed, tr, val);

  std::vector<ComparisonRow> rows;
  for (nn::Arch arch : {nn::Arch::Gru, nn::Arch::Lstm, nn::Arch::BiAtGru,
                        nn::Arch::BiAtLstm}) {
    std::mt19937_64 init_rng(config.train.seed);
    nn::ModelParams model = nn::init_params(arch, config.dims, init_rng);
    nn::AdamState opt = nn::make_adam_state(model);
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonRow row;
    row.arch = arch;
    row.train_report = train::train(model, opt, tr, val, config.train);
    row.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.metrics = evaluate(model, test_set);
    row.model = std::move(model);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {
std::string upper_name(nn::Arch a) {
  std::string s = nn::arch_name(a);
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}
} // namespace

std::string format_comparison_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream ss;
  ss << std::left << std::setw(12) << "Model" << std::right << std::setw(10)
     << "Accuracy" << std::setw(11) << "Precision" << std::setw(8) << "Recall"
     << std::setw(8) << "F1" << '\n';
  ss << std::fixed << std::setprecision(1);
  for (const auto& row : rows) {
    ss << std::left << std::setw(12) << upper_name(row.arch) << std::right
       << std::setw(9) << row.metrics.accuracy * 100.0 << '%' << std::setw(10)
       << row.metrics.macro_precision * 100.0 << '%' << std::setw(7)
       << row.metrics.macro_recall * 100.0 << '%' << std::setw(7)
       << row.metrics.macro_f1 * 100.0 << '%' << '\n';
  }
  return ss.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream ss;
  ss << "model,accuracy,precision,recall,f1,train_seconds\n";
  ss.precision(10);
  for (const auto& row : rows)
    ss << nn::arch_name(row.arch) << ',' << row.metrics.accuracy << ','
       << row.metrics.macro_precision << ',' << row.metrics.macro_recall << ','
       << row.metrics.macro_f1 << ',' << row.train_seconds << '\n';
  return ss.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream ss;
  ss << "true\\pred";
  for (int c = 0; c < kClasses; ++c)
    ss << ',' << rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(c));
  ss << '\n';
  for (int t = 0; t < kClasses; ++t) {
    ss << rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(t));
    for (int p = 0; p < kClasses; ++p) ss << ',' << cm.counts[t][p];
    ss << '\n';
  }
  return ss.str();
}

void write_predictions_jsonl(const std::string& path,
                             const std::vector<Prediction>& predictions) {
  std::ostringstream ss;
  for (const auto& p : predictions) {
    nlohmann::json rec;
    rec["sample_id"] = p.sample_id;
    rec["true"] = p.label;
    rec["predicted"] = p.predicted;
    rec["probs"] = p.probs;
    ss << rec.dump() << '\n';
  }
  dataset::atomic_write(path, ss.str());
}

} // namespace resp::eval
