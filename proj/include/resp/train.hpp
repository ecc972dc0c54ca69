// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_TRAIN_HPP
#define RESP_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "resp/dataset.hpp"
#include "resp/nn.hpp"

namespace resp::train {

struct TrainConfig {
  std::size_t batch_size = 128;
  int epochs = 15;
  nn::AdamConfig adam;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  int eval_every = 1; // epochs between validation passes; 0 disables
  int patience = 5;   // early stop after this many evals without improvement
  // Plateau annealing: every decay_patience evals without improvement, rewind
  // to the best weights so far and multiply the learning rate by lr_decay.
  // decay_patience 0 disables.
  int decay_patience = 0;
  double lr_decay = 0.5;
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double val_accuracy = -1.0; // -1 when not evaluated this epoch
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_val_accuracy = -1.0;
  double final_lr = 0.0; // after any plateau annealing
};

// Deterministic shuffled index batches; the final partial batch is kept.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n,
                                                   std::size_t batch_size,
                                                   std::mt19937_64& rng);

// Mean loss + fraction of correct argmax predictions (ties -> lowest index).
struct EvalResult {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};
EvalResult evaluate_split(const nn::ModelParams& model,
                          const std::vector<dataset::Sample>& samples);

// Mini-batch training: mean gradient over the batch, global-norm clip, Adam.
// When a validation set is given, the model handed back holds the weights of
// the best-validation epoch, not the last one.
// Throws std::runtime_error on non-finite loss.
TrainReport train(nn::ModelParams& model, nn::AdamState& opt_state,
                  const std::vector<dataset::Sample>& train_set,
                  const std::vector<dataset::Sample>& val_set,
                  const TrainConfig& config);

// Deterministic validation holdout: shuffles indices under seed and takes
// the first val_frac share as validation.
void split_train_val(const std::vector<dataset::Sample>& all, double val_frac,
                     std::uint64_t seed, std::vector<dataset::Sample>& train_out,
                     std::vector<dataset::Sample>& val_out);

void write_train_log_csv(const std::string& path, const TrainReport& report);

} // namespace resp::train

#endif
