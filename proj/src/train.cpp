// SPDX-License-Identifier: Apache-2.0
#include "resp/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace resp::train {

std::vector<std::vector<std::size_t>> make_batches(std::size_t n,
                                                   std::size_t batch_size,
                                                   std::mt19937_64& rng) {
  if (n == 0) throw std::invalid_argument("empty dataset");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

namespace {

Mat features_as_mat(const dataset::Sample& s) {
  Mat m(s.features.size(), 1);
  m.data = s.features;
  return m;
}

int argmax_lowest(const Vec& probs) {
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

} // namespace

EvalResult evaluate_split(const nn::ModelParams& model,
                          const std::vector<dataset::Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("empty evaluation split");
  nn::ForwardCache cache;
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const Mat feats = features_as_mat(s);
    const Vec& probs = nn::forward(model, feats, cache);
    loss += nn::cross_entropy(probs, s.label);
    if (argmax_lowest(probs) == s.label) ++correct;
  }
  return EvalResult{loss / static_cast<double>(samples.size()),
                    static_cast<double>(correct) / static_cast<double>(samples.size())};
}

TrainReport train(nn::ModelParams& model, nn::AdamState& opt_state,
                  const std::vector<dataset::Sample>& train_set,
                  const std::vector<dataset::Sample>& val_set,
                  const TrainConfig& config) {
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (train_set.empty()) throw std::invalid_argument("empty training set");
  for (const auto& s : train_set)
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= model.dims.C)
      throw std::invalid_argument("label out of range in training set");

  std::mt19937_64 shuffle_rng(config.seed);
  nn::ForwardCache cache;
  nn::Gradients batch_grads = nn::zeros_like(model);
  nn::Gradients sample_grads = nn::zeros_like(model);
  auto bg_refs = nn::param_refs(batch_grads);
  auto sg_refs = nn::param_refs(sample_grads);

  TrainReport report;
  int evals_since_best = 0;
  nn::ModelParams best_model;
  bool have_best = false;
  nn::AdamConfig adam = config.adam;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto batches = make_batches(train_set.size(), config.batch_size, shuffle_rng);
    double epoch_loss = 0.0;

    for (const auto& batch : batches) {
      for (auto& r : bg_refs) std::fill(r.data, r.data + r.size, 0.0);
      double batch_loss = 0.0;
      for (const std::size_t idx : batch) {
        const dataset::Sample& s = train_set[idx];
        const Mat feats = features_as_mat(s);
        const Vec& probs = nn::forward(model, feats, cache);
        batch_loss += nn::cross_entropy(probs, s.label);
        for (auto& r : sg_refs) std::fill(r.data, r.data + r.size, 0.0);
        nn::backward(model, feats, cache, s.label, sample_grads);
        const double w = 1.0 / static_cast<double>(batch.size());
        for (std::size_t r = 0; r < bg_refs.size(); ++r)
          for (std::size_t i = 0; i < bg_refs[r].size; ++i)
            bg_refs[r].data[i] += w * sg_refs[r].data[i];
      }
      batch_loss /= static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite loss (" << batch_loss << ") at epoch " << epoch
            << "; last step " << opt_state.step;
        throw std::runtime_error(msg.str());
      }
      epoch_loss += batch_loss * static_cast<double>(batch.size());
      nn::clip_by_global_norm(batch_grads, config.clip_norm);
      nn::adam_step(model, batch_grads, opt_state, adam);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = epoch_loss / static_cast<double>(train_set.size());

    const bool do_eval =
        config.eval_every > 0 && !val_set.empty() && epoch % config.eval_every == 0;
    if (do_eval) {
      stats.val_accuracy = evaluate_split(model, val_set).accuracy;
      if (stats.val_accuracy > report.best_val_accuracy) {
        report.best_val_accuracy = stats.val_accuracy;
        report.best_epoch = epoch;
        evals_since_best = 0;
        best_model = model;
        have_best = true;
      } else {
        ++evals_since_best;
        if (config.decay_patience > 0 && have_best &&
            evals_since_best % config.decay_patience == 0) {
          model = best_model;
          adam.lr *= config.lr_decay;
          if (config.verbose)
            std::printf("plateau: rewound to epoch %d, lr -> %g\n",
                        report.best_epoch, adam.lr);
        }
      }
    }

    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (config.verbose) {
      std::printf("epoch %3d  loss %.6f", epoch, stats.mean_loss);
      if (stats.val_accuracy >= 0.0) std::printf("  val_acc %.4f", stats.val_accuracy);
      std::printf("  (%.1fs)\n", stats.seconds);
      std::fflush(stdout);
    }
    report.epochs.push_back(stats);

    if (do_eval && config.patience > 0 && evals_since_best >= config.patience) break;
  }
  // With a validation set, hand back the best-validation weights rather than
  // whatever the last epoch left behind.
  if (have_best) model = best_model;
  report.final_lr = adam.lr;
  return report;
}

void split_train_val(const std::vector<dataset::Sample>& all, double val_frac,
                     std::uint64_t seed, std::vector<dataset::Sample>& train_out,
                     std::vector<dataset::Sample>& val_out) {
  if (val_frac < 0.0 || val_frac >= 1.0)
    throw std::invalid_argument("val_frac must be in [0, 1)");
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::llround(val_frac * static_cast<double>(all.size())));
  train_out.clear();
  val_out.clear();
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_val ? val_out : train_out).push_back(all[order[i]]);
}

void write_train_log_csv(const std::string& path, const TrainReport& report) {
  std::ostringstream ss;
  ss << "epoch,loss,val_accuracy,seconds\n";
  ss.precision(10);
  for (const auto& e : report.epochs) {
    ss << e.epoch << ',' << e.mean_loss << ',';
    if (e.val_accuracy >= 0.0) ss << e.val_accuracy;
    ss << ',' << e.seconds << '\n';
  }
  dataset::atomic_write(path, ss.str());
}

} // namespace resp::train
