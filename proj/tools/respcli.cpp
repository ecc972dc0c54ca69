// SPDX-License-Identifier: Apache-2.0
// Command-line front end: dataset generation, training, evaluation,
// single-recording classification, and the four-model comparison.
#include <array>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "resp/checkpoint.hpp"
#include "resp/dataset.hpp"
#include "resp/eval.hpp"
#include "resp/kernels.hpp"
#include "resp/nn.hpp"
#include "resp/rsm.hpp"
#include "resp/signal.hpp"
#include "resp/train.hpp"

namespace {

using namespace resp;

// Echo the fully resolved configuration next to the main output so a run
// can be replayed from the sidecar alone.
void write_config_sidecar(const CLI::App& app, const std::string& anchor_path) {
  const std::string path = anchor_path + ".config";
  dataset::atomic_write(path, app.config_to_str(true, true));
}

struct GenerateOpts {
  std::string pattern;
  bool all = false;
  std::int64_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
  double rate_hz = 10.0;
  double window_s = 60.0;
  std::string templates_path;
};

int cmd_generate(const CLI::App& app, const GenerateOpts& o) {
  auto templates = rsm::default_templates();
  if (!o.templates_path.empty()) rsm::load_template_overrides(o.templates_path, templates);
  for (auto& t : templates) {
    t.sample_rate_hz = o.rate_hz;
    t.window_seconds = o.window_s;
    t.validate();
  }
  std::array<std::int64_t, rsm::kNumPatterns> counts{};
  if (o.all) {
    counts.fill(o.count);
  } else {
    counts[static_cast<int>(rsm::pattern_from_string(o.pattern))] = o.count;
  }
  if (o.count == 0) std::fprintf(stderr, "warning: --count 0, writing an empty dataset\n");

  rsm::Rng rng(o.seed);
  const auto data = rsm::generate_dataset(counts, templates, rng);
  dataset::write_jsonl(o.out, data);
  write_config_sidecar(app, o.out);

  std::printf("wrote %zu records to %s\n", data.size(), o.out.c_str());
  for (int c = 0; c < rsm::kNumPatterns; ++c)
    std::printf("  %-14s %lld\n", rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(c)),
                static_cast<long long>(counts[c]));
  return 0;
}

struct ModelOpts {
  std::size_t hidden = 32;
  std::size_t attention = 8;
  std::size_t target_len = 600;
  std::size_t smooth_span = 5;
};

struct TrainOpts {
  std::string arch = "bi-at-gru";
  std::string train_path;
  double val_frac = 0.1;
  train::TrainConfig cfg;
  ModelOpts model;
  std::string out_ckpt;
  std::string log_path;
};

signal::PreprocessConfig preprocess_config(const ModelOpts& m) {
  return signal::PreprocessConfig{m.smooth_span, m.target_len, true};
}

int cmd_train(const CLI::App& app, TrainOpts& o) {
  const nn::Arch arch = nn::arch_from_string(o.arch);
  const auto raw = dataset::read_jsonl(o.train_path);
  if (raw.empty()) throw std::runtime_error("training dataset is empty");
  const auto samples = dataset::preprocess_all(raw, preprocess_config(o.model));

  std::vector<dataset::Sample> tr, val;
  train::split_train_val(samples, o.val_frac, o.cfg.seed, tr, val);

  nn::Dims dims{1, o.model.hidden, o.model.attention, 6};
  std::mt19937_64 init_rng(o.cfg.seed);
  nn::ModelParams model = nn::init_params(arch, dims, init_rng);
  nn::AdamState opt = nn::make_adam_state(model);

  o.cfg.verbose = true;
  const auto report = train::train(model, opt, tr, val, o.cfg);

  checkpoint::save(o.out_ckpt, checkpoint::Checkpoint{
                                   model, opt,
                                   static_cast<std::uint64_t>(opt.step), o.cfg.seed});
  write_config_sidecar(app, o.out_ckpt);
  if (!o.log_path.empty()) train::write_train_log_csv(o.log_path, report);
  std::printf("checkpoint written to %s (best val_acc %.4f at epoch %d)\n",
              o.out_ckpt.c_str(), report.best_val_accuracy, report.best_epoch);
  return 0;
}

struct EvalOpts {
  std::string ckpt;
  std::string test_path;
  ModelOpts model;
  std::string out_prefix;
};

void print_metrics(const eval::MetricsReport& rep) {
  std::printf("accuracy  %.4f\nprecision %.4f\nrecall    %.4f\nf1        %.4f\n",
              rep.accuracy, rep.macro_precision, rep.macro_recall, rep.macro_f1);
  std::printf("confusion matrix (rows = true, cols = predicted):\n");
  for (int t = 0; t < eval::kClasses; ++t) {
    std::printf("  %-14s", rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(t)));
    for (int p = 0; p < eval::kClasses; ++p)
      std::printf(" %6lld", static_cast<long long>(rep.confusion.counts[t][p]));
    std::printf("\n");
  }
}

int cmd_eval(const CLI::App& app, const EvalOpts& o) {
  const auto ckpt = checkpoint::load(o.ckpt);
  const auto raw = dataset::read_jsonl(o.test_path);
  const auto pcfg = preprocess_config(o.model);
  const auto samples = dataset::preprocess_all(raw, pcfg);
  for (const auto& s : samples)
    if (s.features.size() != pcfg.target_len)
      throw std::runtime_error("sequence length mismatch: expected " +
                               std::to_string(pcfg.target_len) + ", got " +
                               std::to_string(s.features.size()));

  std::vector<eval::Prediction> preds;
  const auto rep = eval::evaluate(ckpt.model, samples, &preds);
  print_metrics(rep);
  if (!o.out_prefix.empty()) {
    dataset::atomic_write(o.out_prefix + "_confusion.csv", eval::confusion_csv(rep.confusion));
    eval::write_predictions_jsonl(o.out_prefix + "_predictions.jsonl", preds);
    write_config_sidecar(app, o.out_prefix + "_metrics");
    std::ostringstream ss;
    ss << "accuracy,precision,recall,f1\n";
    ss.precision(10);
    ss << rep.accuracy << ',' << rep.macro_precision << ',' << rep.macro_recall << ','
       << rep.macro_f1 << '\n';
    dataset::atomic_write(o.out_prefix + "_metrics.csv", ss.str());
  }
  return 0;
}

struct ClassifyOpts {
  std::string ckpt;
  std::string input;
  double rate_hz = 10.0;
  ModelOpts model;
};

int cmd_classify(const ClassifyOpts& o) {
  const auto ckpt = checkpoint::load(o.ckpt);
  rsm::Waveform w;
  w.samples = dataset::read_csv_signal(o.input);
  w.sample_rate_hz = o.rate_hz;
  const auto features = signal::preprocess(w, preprocess_config(o.model));

  Mat feats(features.size(), 1);
  feats.data = features;
  nn::ForwardCache cache;
  const Vec& probs = nn::forward(ckpt.model, feats, cache);
  int best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[static_cast<std::size_t>(best)]) best = static_cast<int>(k);

  std::printf("predicted: %s (class %d)\n",
              rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(best)), best);
  for (int c = 0; c < rsm::kNumPatterns; ++c)
    std::printf("  %-14s %.6f\n",
                rsm::pattern_name(static_cast<rsm::RespiratoryPattern>(c)), probs[static_cast<std::size_t>(c)]);
  return 0;
}

struct CompareOpts {
  std::string train_path;
  std::string test_path;
  ModelOpts model;
  train::TrainConfig cfg;
  double val_frac = 0.1;
  std::string out_prefix = "comparison";
};

int cmd_compare(const CLI::App& app, CompareOpts& o) {
  const auto train_raw = dataset::read_jsonl(o.train_path);
  const auto test_raw = dataset::read_jsonl(o.test_path);
  const auto pcfg = preprocess_config(o.model);
  const auto train_samples = dataset::preprocess_all(train_raw, pcfg);
  const auto test_samples = dataset::preprocess_all(test_raw, pcfg);

  eval::ComparisonConfig ccfg;
  ccfg.dims = nn::Dims{1, o.model.hidden, o.model.attention, 6};
  ccfg.train = o.cfg;
  ccfg.train.verbose = true;
  ccfg.val_frac = o.val_frac;

  const auto rows = eval::run_comparison(train_samples, test_samples, ccfg);
  const std::string table = eval::format_comparison_table(rows);
  std::printf("%s", table.c_str());

  // qualitative ordering: bidirectional+attention vs the plain baseline
  const double acc_gru = rows[0].metrics.accuracy;
  const double acc_biatgru = rows[2].metrics.accuracy;
  std::printf("ordering bi-at-gru >= gru: %s (%.4f vs %.4f)\n",
              acc_biatgru >= acc_gru ? "yes" : "no", acc_biatgru, acc_gru);

  dataset::atomic_write(o.out_prefix + "_table.txt", table);
  std::string csv = eval::comparison_csv(rows);
  csv += "ordering_bi_at_gru_ge_gru," + std::string(acc_biatgru >= acc_gru ? "1" : "0") + "\n";
  dataset::atomic_write(o.out_prefix + "_metrics.csv", csv);
  for (const auto& row : rows)
    dataset::atomic_write(o.out_prefix + "_confusion_" + nn::arch_name(row.arch) + ".csv",
                          eval::confusion_csv(row.metrics.confusion));
  write_config_sidecar(app, o.out_prefix);
  return 0;
}

void add_model_opts(CLI::App* sub, ModelOpts& m) {
  sub->add_option("--hidden", m.hidden, "hidden units per direction")->check(CLI::PositiveNumber);
  sub->add_option("--attention", m.attention, "attention hidden width")->check(CLI::PositiveNumber);
  sub->add_option("--target-len", m.target_len, "sequence length after preprocessing")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  sub->add_option("--smooth-span", m.smooth_span, "moving-average span (odd)");
}

void add_train_cfg(CLI::App* sub, train::TrainConfig& cfg) {
  sub->add_option("--epochs", cfg.epochs)->check(CLI::PositiveNumber);
  sub->add_option("--batch", cfg.batch_size)->check(CLI::PositiveNumber);
  sub->add_option("--lr", cfg.adam.lr)->check(CLI::PositiveNumber);
  sub->add_option("--clip-norm", cfg.clip_norm)->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed);
  sub->add_option("--patience", cfg.patience);
  sub->add_option("--eval-every", cfg.eval_every);
  sub->add_option("--decay-patience", cfg.decay_patience);
  sub->add_option("--lr-decay", cfg.lr_decay)->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"respiratory pattern simulation and classification"};
  app.set_config("--config", "", "read options from an INI config file");
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* sub_gen = app.add_subcommand("generate", "synthesize a labeled dataset");
  auto* pat = sub_gen->add_option("--pattern", gen.pattern,
                                  "one pattern (eupnea, bradypnea, tachypnea, biots, "
                                  "cheyne-stokes, central-apnea)");
  auto* all = sub_gen->add_flag("--all", gen.all, "generate every pattern");
  pat->excludes(all);
  sub_gen->add_option("--count", gen.count, "records per selected pattern")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sub_gen->add_option("--seed", gen.seed);
  sub_gen->add_option("--out", gen.out, "output JSON-lines path")->required();
  sub_gen->add_option("--rate-hz", gen.rate_hz)->check(CLI::PositiveNumber);
  sub_gen->add_option("--window-s", gen.window_s)->check(CLI::PositiveNumber);
  sub_gen->add_option("--templates", gen.templates_path, "template override config file");

  TrainOpts tro;
  auto* sub_train = app.add_subcommand("train", "train one architecture");
  sub_train->add_option("--arch", tro.arch, "gru | lstm | bi-at-gru | bi-at-lstm");
  sub_train->add_option("--train", tro.train_path, "training JSON-lines dataset")->required();
  sub_train->add_option("--val-frac", tro.val_frac)->check(CLI::Range(0.0, 0.99));
  sub_train->add_option("--out-ckpt", tro.out_ckpt)->required();
  sub_train->add_option("--log", tro.log_path, "training log CSV path");
  add_model_opts(sub_train, tro.model);
  add_train_cfg(sub_train, tro.cfg);

  EvalOpts evo;
  auto* sub_eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  sub_eval->add_option("--ckpt", evo.ckpt)->required();
  sub_eval->add_option("--test", evo.test_path)->required();
  sub_eval->add_option("--out-prefix", evo.out_prefix, "write metrics/confusion/prediction files");
  add_model_opts(sub_eval, evo.model);

  ClassifyOpts clo;
  auto* sub_classify = app.add_subcommand("classify", "classify a raw CSV recording");
  sub_classify->add_option("--ckpt", clo.ckpt)->required();
  sub_classify->add_option("--input", clo.input, "CSV, one sample per line")->required();
  sub_classify->add_option("--rate-hz", clo.rate_hz)->check(CLI::PositiveNumber);
  add_model_opts(sub_classify, clo.model);

  CompareOpts cmo;
  auto* sub_compare = app.add_subcommand("compare", "train and compare all four architectures");
  sub_compare->add_option("--train", cmo.train_path)->required();
  sub_compare->add_option("--test", cmo.test_path)->required();
  sub_compare->add_option("--val-frac", cmo.val_frac)->check(CLI::Range(0.0, 0.99));
  sub_compare->add_option("--out-prefix", cmo.out_prefix);
  add_model_opts(sub_compare, cmo.model);
  add_train_cfg(sub_compare, cmo.cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_gen->parsed()) {
      if (!gen.all && gen.pattern.empty())
        throw std::runtime_error("either --pattern or --all is required");
      return cmd_generate(app, gen);
    }
    if (sub_train->parsed()) return cmd_train(app, tro);
    if (sub_eval->parsed()) return cmd_eval(app, evo);
    if (sub_classify->parsed()) return cmd_classify(clo);
    if (sub_compare->parsed()) return cmd_compare(app, cmo);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
