// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_NN_HPP
#define RESP_NN_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "resp/mat.hpp"

namespace resp::nn {

enum class Arch : int { Gru = 0, Lstm = 1, BiAtGru = 2, BiAtLstm = 3 };

const char* arch_name(Arch a); // "gru", "lstm", "bi-at-gru", "bi-at-lstm"
Arch arch_from_string(const std::string& name);
bool is_gru(Arch a);
bool is_bidirectional(Arch a);
bool has_attention(Arch a);

struct Dims {
  std::size_t D = 1;  // input width per timestep
  std::size_t H = 128; // hidden units per direction
  std::size_t A = 16;  // attention hidden width
  std::size_t C = 6;   // classes
  bool operator==(const Dims&) const = default;
};

struct GruParams {
  Mat Wz, Wr, Wh; // H x D
  Mat Uz, Ur, Uh; // H x H
  Vec bz, br, bh; // H
  bool operator==(const GruParams&) const = default;
};

struct LstmParams {
  Mat Wi, Wf, Wo, Wg; // H x D
  Mat Ui, Uf, Uo, Ug; // H x H
  Vec bi, bf, bo, bg; // H
  bool operator==(const LstmParams&) const = default;
};

struct AttentionParams {
  Mat Wa; // A x K
  Vec ba; // A
  Vec va; // A
  bool operator==(const AttentionParams&) const = default;
};

// Only the components demanded by the architecture tag are sized; the rest
// stay empty, so their gradients are absent by construction.
struct ModelParams {
  Arch arch = Arch::Gru;
  Dims dims;
  GruParams gru_fwd, gru_bwd;
  LstmParams lstm_fwd, lstm_bwd;
  AttentionParams attn;
  Mat Wout; // C x K
  Vec bout; // C

  // K: width of the state entering the classifier head.
  std::size_t state_width() const {
    return is_bidirectional(arch) ? 2 * dims.H : dims.H;
  }
  bool operator==(const ModelParams&) const = default;
};

using Gradients = ModelParams;

struct ParamRef {
  const char* name;
  double* data;
  std::size_t size;
};

// Every parameter array of the model in its declared (serialization) order.
std::vector<ParamRef> param_refs(ModelParams& m);

ModelParams zeros_like(const ModelParams& m);

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
ModelParams init_params(Arch arch, const Dims& dims, std::mt19937_64& rng);

// ---- cells ----

struct GruStepCache {
  Vec z, r, hc, rh; // gates, candidate, r (.) h_prev
};
struct LstmStepCache {
  Vec i, f, o, g, c, tanh_c;
};

Vec gru_cell_step(const GruParams& p, const Vec& x_t, const Vec& h_prev,
                  GruStepCache* cache = nullptr);
// returns (h_t, c_t)
std::pair<Vec, Vec> lstm_cell_step(const LstmParams& p, const Vec& x_t,
                                   const Vec& h_prev, const Vec& c_prev,
                                   LstmStepCache* cache = nullptr);

// ---- sequence layers ----

// Unrolls one direction over features (T x D). When reverse, iterates
// t = T..1 but returns states aligned to the original time indices.
std::vector<Vec> run_direction(const GruParams& p, const Mat& features, bool reverse);
std::vector<Vec> run_direction(const LstmParams& p, const Mat& features, bool reverse);

// h_t = [fwd_t, bwd_t] per timestep.
std::vector<Vec> concat_bidirectional(const std::vector<Vec>& fwd_states,
                                      const std::vector<Vec>& bwd_states);

struct AttentionResult {
  Vec summary; // S, width K
  Vec alphas;  // T, nonnegative, sums to 1
};
// u_t = tanh(Wa h_t + ba); alpha = softmax(va . u_t); S = sum_t alpha_t h_t
AttentionResult attention_forward(const AttentionParams& p,
                                  const std::vector<Vec>& states);

// softmax(Wout S + bout), max-subtracted for stability
Vec output_forward(const Mat& Wout, const Vec& bout, const Vec& summary);

// -log(max(probs[label], 1e-12))
double cross_entropy(const Vec& probs, int label);

Vec softmax(const Vec& logits);

// ---- full model ----

struct ForwardCache {
  std::size_t T = 0;
  std::vector<Vec> h_fwd, h_bwd;        // per-direction states, time-aligned
  std::vector<GruStepCache> gru_fwd, gru_bwd;
  std::vector<LstmStepCache> lstm_fwd, lstm_bwd;
  std::vector<Vec> states;              // head input per t (width K)
  std::vector<Vec> u;                   // attention hidden reps
  Vec alphas;
  Vec summary; // S
  Vec probs;
};

// features: T x D. Fills the cache with everything backward needs.
const Vec& forward(const ModelParams& model, const Mat& features, ForwardCache& cache);

// Accumulates d(cross_entropy(forward(features), label))/dparams into grads.
void backward(const ModelParams& model, const Mat& features,
              const ForwardCache& cache, int label, Gradients& grads);

// Central finite differences over every parameter; the gradient oracle.
Gradients fd_gradient(const ModelParams& model, const Mat& features, int label,
                      double epsilon);

// ---- optimizer ----

struct AdamState {
  ModelParams m, v; // first/second moments, same shapes as the model
  std::int64_t step = 0;
  bool operator==(const AdamState&) const = default;
};

AdamState make_adam_state(const ModelParams& model);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& cfg);

double grad_norm(const Gradients& grads);
// Scales grads so the global norm is <= max_norm.
void clip_by_global_norm(Gradients& grads, double max_norm);

} // namespace resp::nn

#endif
