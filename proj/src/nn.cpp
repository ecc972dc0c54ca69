// SPDX-License-Identifier: Apache-2.0
#include "resp/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resp/kernels.hpp"

namespace resp::nn {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void glorot(Mat& m, std::mt19937_64& rng) {
  // fan_in = cols, fan_out = rows
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& w : m.data) w = dist(rng);
}

void glorot_vec(Vec& v, std::size_t fan_in, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + 1));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& w : v) w = dist(rng);
}

GruParams make_gru(std::size_t H, std::size_t D) {
  GruParams p;
  p.Wz = Mat(H, D); p.Wr = Mat(H, D); p.Wh = Mat(H, D);
  p.Uz = Mat(H, H); p.Ur = Mat(H, H); p.Uh = Mat(H, H);
  // h = (1-z)*h_prev + z*h_cand, so a negative update-gate bias starts the
  // cell leaning toward carry — same role as the LSTM forget bias below.
  p.bz.assign(H, -1.0); p.br.assign(H, 0.0); p.bh.assign(H, 0.0);
  return p;
}

LstmParams make_lstm(std::size_t H, std::size_t D) {
  LstmParams p;
  p.Wi = Mat(H, D); p.Wf = Mat(H, D); p.Wo = Mat(H, D); p.Wg = Mat(H, D);
  p.Ui = Mat(H, H); p.Uf = Mat(H, H); p.Uo = Mat(H, H); p.Ug = Mat(H, H);
  // Forget bias starts at 1 so the cell state survives long sequences from
  // the first steps; the other biases start at 0.
  p.bi.assign(H, 0.0); p.bf.assign(H, 1.0); p.bo.assign(H, 0.0); p.bg.assign(H, 0.0);
  return p;
}

} // namespace

const char* arch_name(Arch a) {
  switch (a) {
    case Arch::Gru: return "gru";
    case Arch::Lstm: return "lstm";
    case Arch::BiAtGru: return "bi-at-gru";
    case Arch::BiAtLstm: return "bi-at-lstm";
  }
  throw std::invalid_argument("unknown architecture value");
}

Arch arch_from_string(const std::string& name) {
  std::string key;
  for (char ch : name) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "gru") return Arch::Gru;
  if (key == "lstm") return Arch::Lstm;
  if (key == "biatgru") return Arch::BiAtGru;
  if (key == "biatlstm") return Arch::BiAtLstm;
  throw std::invalid_argument("unknown architecture: " + name);
}

bool is_gru(Arch a) { return a == Arch::Gru || a == Arch::BiAtGru; }
bool is_bidirectional(Arch a) { return a == Arch::BiAtGru || a == Arch::BiAtLstm; }
bool has_attention(Arch a) { return is_bidirectional(a); }

std::vector<ParamRef> param_refs(ModelParams& m) {
  std::vector<ParamRef> refs;
  auto add_mat = [&](const char* name, Mat& mat) {
    if (!mat.empty()) refs.push_back({name, mat.data.data(), mat.size()});
  };
  auto add_vec = [&](const char* name, Vec& v) {
    if (!v.empty()) refs.push_back({name, v.data(), v.size()});
  };
  auto add_gru = [&](const char* dir, GruParams& g) {
    (void)dir;
    add_mat("Wz", g.Wz); add_mat("Wr", g.Wr); add_mat("Wh", g.Wh);
    add_mat("Uz", g.Uz); add_mat("Ur", g.Ur); add_mat("Uh", g.Uh);
    add_vec("bz", g.bz); add_vec("br", g.br); add_vec("bh", g.bh);
  };
  auto add_lstm = [&](const char* dir, LstmParams& l) {
    (void)dir;
    add_mat("Wi", l.Wi); add_mat("Wf", l.Wf); add_mat("Wo", l.Wo); add_mat("Wg", l.Wg);
    add_mat("Ui", l.Ui); add_mat("Uf", l.Uf); add_mat("Uo", l.Uo); add_mat("Ug", l.Ug);
    add_vec("bi", l.bi); add_vec("bf", l.bf); add_vec("bo", l.bo); add_vec("bg", l.bg);
  };
  add_gru("fwd", m.gru_fwd);
  add_gru("bwd", m.gru_bwd);
  add_lstm("fwd", m.lstm_fwd);
  add_lstm("bwd", m.lstm_bwd);
  add_mat("Wa", m.attn.Wa);
  add_vec("ba", m.attn.ba);
  add_vec("va", m.attn.va);
  add_mat("Wout", m.Wout);
  add_vec("bout", m.bout);
  return refs;
}

ModelParams zeros_like(const ModelParams& m) {
  ModelParams z = m;
  auto refs = param_refs(z);
  for (auto& r : refs) std::fill(r.data, r.data + r.size, 0.0);
  return z;
}

ModelParams init_params(Arch arch, const Dims& dims, std::mt19937_64& rng) {
  check(dims.D >= 1 && dims.H >= 1 && dims.C >= 2, "invalid dims");
  if (has_attention(arch)) check(dims.A >= 1, "invalid attention dim");

  ModelParams m;
  m.arch = arch;
  m.dims = dims;
  const std::size_t H = dims.H, D = dims.D;

  if (is_gru(arch)) {
    m.gru_fwd = make_gru(H, D);
    if (is_bidirectional(arch)) m.gru_bwd = make_gru(H, D);
  } else {
    m.lstm_fwd = make_lstm(H, D);
    if (is_bidirectional(arch)) m.lstm_bwd = make_lstm(H, D);
  }
  const std::size_t K = m.state_width();
  if (has_attention(arch)) {
    m.attn.Wa = Mat(dims.A, K);
    m.attn.ba.assign(dims.A, 0.0);
    m.attn.va.assign(dims.A, 0.0);
  }
  m.Wout = Mat(dims.C, K);
  m.bout.assign(dims.C, 0.0);

  // Weights drawn in declared order so the layout is reproducible.
  auto init_gru = [&](GruParams& g) {
    glorot(g.Wz, rng); glorot(g.Wr, rng); glorot(g.Wh, rng);
    glorot(g.Uz, rng); glorot(g.Ur, rng); glorot(g.Uh, rng);
  };
  auto init_lstm = [&](LstmParams& l) {
    glorot(l.Wi, rng); glorot(l.Wf, rng); glorot(l.Wo, rng); glorot(l.Wg, rng);
    glorot(l.Ui, rng); glorot(l.Uf, rng); glorot(l.Uo, rng); glorot(l.Ug, rng);
  };
  if (!m.gru_fwd.Wz.empty()) init_gru(m.gru_fwd);
  if (!m.gru_bwd.Wz.empty()) init_gru(m.gru_bwd);
  if (!m.lstm_fwd.Wi.empty()) init_lstm(m.lstm_fwd);
  if (!m.lstm_bwd.Wi.empty()) init_lstm(m.lstm_bwd);
  if (!m.attn.Wa.empty()) {
    glorot(m.attn.Wa, rng);
    glorot_vec(m.attn.va, dims.A, rng);
  }
  glorot(m.Wout, rng);
  return m;
}

// ---- cells ----

namespace {

// az/ar/ah are the gate pre-activations.
void gru_step_impl(const GruParams& p, const double* x, std::size_t D,
                   const Vec& h_prev, Vec& h_out, GruStepCache& c) {
  const std::size_t H = h_prev.size();
  c.z = p.bz;
  c.r = p.br;
  kernels::gemv_acc(p.Wz.data.data(), H, D, x, c.z.data());
  kernels::gemv_acc(p.Uz.data.data(), H, H, h_prev.data(), c.z.data());
  kernels::gemv_acc(p.Wr.data.data(), H, D, x, c.r.data());
  kernels::gemv_acc(p.Ur.data.data(), H, H, h_prev.data(), c.r.data());
  c.rh.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    c.z[j] = sigmoid(c.z[j]);
    c.r[j] = sigmoid(c.r[j]);
    c.rh[j] = c.r[j] * h_prev[j];
  }
  c.hc = p.bh;
  kernels::gemv_acc(p.Wh.data.data(), H, D, x, c.hc.data());
  kernels::gemv_acc(p.Uh.data.data(), H, H, c.rh.data(), c.hc.data());
  h_out.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    c.hc[j] = std::tanh(c.hc[j]);
    h_out[j] = (1.0 - c.z[j]) * h_prev[j] + c.z[j] * c.hc[j];
  }
}

void lstm_step_impl(const LstmParams& p, const double* x, std::size_t D,
                    const Vec& h_prev, const Vec& c_prev, Vec& h_out, Vec& c_out,
                    LstmStepCache& c) {
  const std::size_t H = h_prev.size();
  c.i = p.bi; c.f = p.bf; c.o = p.bo; c.g = p.bg;
  kernels::gemv_acc(p.Wi.data.data(), H, D, x, c.i.data());
  kernels::gemv_acc(p.Ui.data.data(), H, H, h_prev.data(), c.i.data());
  kernels::gemv_acc(p.Wf.data.data(), H, D, x, c.f.data());
  kernels::gemv_acc(p.Uf.data.data(), H, H, h_prev.data(), c.f.data());
  kernels::gemv_acc(p.Wo.data.data(), H, D, x, c.o.data());
  kernels::gemv_acc(p.Uo.data.data(), H, H, h_prev.data(), c.o.data());
  kernels::gemv_acc(p.Wg.data.data(), H, D, x, c.g.data());
  kernels::gemv_acc(p.Ug.data.data(), H, H, h_prev.data(), c.g.data());
  c.c.resize(H); c.tanh_c.resize(H);
  h_out.resize(H); c_out.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    c.i[j] = sigmoid(c.i[j]);
    c.f[j] = sigmoid(c.f[j]);
    c.o[j] = sigmoid(c.o[j]);
    c.g[j] = std::tanh(c.g[j]);
    c.c[j] = c.f[j] * c_prev[j] + c.i[j] * c.g[j];
    c.tanh_c[j] = std::tanh(c.c[j]);
    c_out[j] = c.c[j];
    h_out[j] = c.o[j] * c.tanh_c[j];
  }
}

void check_gru_shapes(const GruParams& p, std::size_t D, std::size_t H) {
  check(p.Wz.rows == H && p.Wz.cols == D && p.Wr.rows == H && p.Wh.rows == H &&
            p.Uz.rows == H && p.Uz.cols == H && p.Ur.cols == H && p.Uh.cols == H &&
            p.bz.size() == H && p.br.size() == H && p.bh.size() == H,
        "gru shape mismatch");
}

void check_lstm_shapes(const LstmParams& p, std::size_t D, std::size_t H) {
  check(p.Wi.rows == H && p.Wi.cols == D && p.Wf.rows == H && p.Wo.rows == H &&
            p.Wg.rows == H && p.Ui.rows == H && p.Ui.cols == H && p.Uf.cols == H &&
            p.Uo.cols == H && p.Ug.cols == H && p.bi.size() == H &&
            p.bf.size() == H && p.bo.size() == H && p.bg.size() == H,
        "lstm shape mismatch");
}

} // namespace

Vec gru_cell_step(const GruParams& p, const Vec& x_t, const Vec& h_prev,
                  GruStepCache* cache) {
  check_gru_shapes(p, x_t.size(), h_prev.size());
  GruStepCache local;
  GruStepCache& c = cache ? *cache : local;
  Vec h;
  gru_step_impl(p, x_t.data(), x_t.size(), h_prev, h, c);
  return h;
}

std::pair<Vec, Vec> lstm_cell_step(const LstmParams& p, const Vec& x_t,
                                   const Vec& h_prev, const Vec& c_prev,
                                   LstmStepCache* cache) {
  check_lstm_shapes(p, x_t.size(), h_prev.size());
  check(c_prev.size() == h_prev.size(), "lstm shape mismatch");
  LstmStepCache local;
  LstmStepCache& c = cache ? *cache : local;
  Vec h, cc;
  lstm_step_impl(p, x_t.data(), x_t.size(), h_prev, c_prev, h, cc, c);
  return {std::move(h), std::move(cc)};
}

// ---- sequence layers ----

namespace {

void run_gru_direction(const GruParams& p, const Mat& features, bool reverse,
                       std::vector<Vec>& h, std::vector<GruStepCache>& caches) {
  const std::size_t T = features.rows, D = features.cols, H = p.bz.size();
  check(T >= 1, "empty sequence");
  check_gru_shapes(p, D, H);
  h.resize(T);
  caches.resize(T);
  Vec h_prev(H, 0.0);
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    gru_step_impl(p, features.data.data() + t * D, D, h_prev, h[t], caches[t]);
    h_prev = h[t];
  }
}

void run_lstm_direction(const LstmParams& p, const Mat& features, bool reverse,
                        std::vector<Vec>& h, std::vector<LstmStepCache>& caches) {
  const std::size_t T = features.rows, D = features.cols, H = p.bi.size();
  check(T >= 1, "empty sequence");
  check_lstm_shapes(p, D, H);
  h.resize(T);
  caches.resize(T);
  Vec h_prev(H, 0.0), c_prev(H, 0.0), c_out;
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    lstm_step_impl(p, features.data.data() + t * D, D, h_prev, c_prev, h[t], c_out,
                   caches[t]);
    h_prev = h[t];
    c_prev = c_out;
  }
}

} // namespace

std::vector<Vec> run_direction(const GruParams& p, const Mat& features, bool reverse) {
  std::vector<Vec> h;
  std::vector<GruStepCache> caches;
  run_gru_direction(p, features, reverse, h, caches);
  return h;
}

std::vector<Vec> run_direction(const LstmParams& p, const Mat& features, bool reverse) {
  std::vector<Vec> h;
  std::vector<LstmStepCache> caches;
  run_lstm_direction(p, features, reverse, h, caches);
  return h;
}

std::vector<Vec> concat_bidirectional(const std::vector<Vec>& fwd_states,
                                      const std::vector<Vec>& bwd_states) {
  check(fwd_states.size() == bwd_states.size(), "direction length mismatch");
  std::vector<Vec> out(fwd_states.size());
  for (std::size_t t = 0; t < fwd_states.size(); ++t) {
    out[t].reserve(fwd_states[t].size() + bwd_states[t].size());
    out[t].assign(fwd_states[t].begin(), fwd_states[t].end());
    out[t].insert(out[t].end(), bwd_states[t].begin(), bwd_states[t].end());
  }
  return out;
}

Vec softmax(const Vec& logits) {
  check(!logits.empty(), "empty logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

void attention_impl(const AttentionParams& p, const std::vector<Vec>& states,
                    std::vector<Vec>& u, Vec& alphas, Vec& summary) {
  check(!states.empty(), "empty state sequence");
  const std::size_t T = states.size(), K = states[0].size(), A = p.ba.size();
  check(p.Wa.rows == A && p.Wa.cols == K && p.va.size() == A,
        "attention shape mismatch");
  u.resize(T);
  Vec scores(T);
  for (std::size_t t = 0; t < T; ++t) {
    check(states[t].size() == K, "ragged state sequence");
    u[t] = p.ba;
    kernels::gemv_acc(p.Wa.data.data(), A, K, states[t].data(), u[t].data());
    for (double& v : u[t]) v = std::tanh(v);
    scores[t] = kernels::dot(A, p.va.data(), u[t].data());
  }
  alphas = softmax(scores);
  summary.assign(K, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    kernels::axpy(K, alphas[t], states[t].data(), summary.data());
}

} // namespace

AttentionResult attention_forward(const AttentionParams& p,
                                  const std::vector<Vec>& states) {
  AttentionResult r;
  std::vector<Vec> u;
  attention_impl(p, states, u, r.alphas, r.summary);
  return r;
}

Vec output_forward(const Mat& Wout, const Vec& bout, const Vec& summary) {
  check(Wout.rows == bout.size() && Wout.cols == summary.size(),
        "output layer shape mismatch");
  Vec logits = bout;
  kernels::gemv_acc(Wout.data.data(), Wout.rows, Wout.cols, summary.data(),
                    logits.data());
  return softmax(logits);
}

double cross_entropy(const Vec& probs, int label) {
  check(label >= 0 && static_cast<std::size_t>(label) < probs.size(),
        "label out of range");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

// ---- full model ----

const Vec& forward(const ModelParams& model, const Mat& features, ForwardCache& cache) {
  check(features.rows >= 1, "empty feature sequence");
  check(features.cols == model.dims.D, "feature width mismatch");
  const std::size_t T = features.rows;
  cache.T = T;

  if (is_gru(model.arch)) {
    run_gru_direction(model.gru_fwd, features, false, cache.h_fwd, cache.gru_fwd);
    if (is_bidirectional(model.arch))
      run_gru_direction(model.gru_bwd, features, true, cache.h_bwd, cache.gru_bwd);
  } else {
    run_lstm_direction(model.lstm_fwd, features, false, cache.h_fwd, cache.lstm_fwd);
    if (is_bidirectional(model.arch))
      run_lstm_direction(model.lstm_bwd, features, true, cache.h_bwd, cache.lstm_bwd);
  }

  if (has_attention(model.arch)) {
    cache.states = concat_bidirectional(cache.h_fwd, cache.h_bwd);
    attention_impl(model.attn, cache.states, cache.u, cache.alphas, cache.summary);
  } else {
    cache.summary = cache.h_fwd.back();
  }
  cache.probs = output_forward(model.Wout, model.bout, cache.summary);
  return cache.probs;
}

namespace {

// BPTT through one GRU direction. dh_ext[t] is the gradient arriving at
// h_t from the head/attention; reverse flips the recurrence arrow.
void gru_direction_backward(const GruParams& p, const Mat& features,
                            const std::vector<Vec>& h,
                            const std::vector<GruStepCache>& caches,
                            const std::vector<Vec>& dh_ext, bool reverse,
                            GruParams& g) {
  const std::size_t T = features.rows, D = features.cols, H = p.bz.size();
  const Vec zero(H, 0.0);
  Vec dh(H), dcarry(H, 0.0), da(H), drh(H), dr(H), dnew(H);
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? step : T - 1 - step;
    const Vec& h_prev = reverse ? (t + 1 < T ? h[t + 1] : zero)
                                : (t > 0 ? h[t - 1] : zero);
    const GruStepCache& c = caches[t];
    const double* x = features.data.data() + t * D;

    for (std::size_t j = 0; j < H; ++j) dh[j] = dh_ext[t][j] + dcarry[j];

    // candidate path: da = dL/d(pre-activation of h~)
    for (std::size_t j = 0; j < H; ++j) {
      const double dhc = dh[j] * c.z[j];
      da[j] = dhc * (1.0 - c.hc[j] * c.hc[j]);
      dnew[j] = dh[j] * (1.0 - c.z[j]);
    }
    kernels::ger_acc(g.Wh.data.data(), H, D, da.data(), x);
    kernels::ger_acc(g.Uh.data.data(), H, H, da.data(), c.rh.data());
    kernels::axpy(H, 1.0, da.data(), g.bh.data());
    std::fill(drh.begin(), drh.end(), 0.0);
    kernels::gemv_t_acc(p.Uh.data.data(), H, H, da.data(), drh.data());
    for (std::size_t j = 0; j < H; ++j) {
      dr[j] = drh[j] * h_prev[j];
      dnew[j] += drh[j] * c.r[j];
    }

    // update gate
    for (std::size_t j = 0; j < H; ++j) {
      const double dz = dh[j] * (c.hc[j] - h_prev[j]);
      da[j] = dz * c.z[j] * (1.0 - c.z[j]);
    }
    kernels::ger_acc(g.Wz.data.data(), H, D, da.data(), x);
    kernels::ger_acc(g.Uz.data.data(), H, H, da.data(), h_prev.data());
    kernels::axpy(H, 1.0, da.data(), g.bz.data());
    kernels::gemv_t_acc(p.Uz.data.data(), H, H, da.data(), dnew.data());

    // reset gate
    for (std::size_t j = 0; j < H; ++j) da[j] = dr[j] * c.r[j] * (1.0 - c.r[j]);
    kernels::ger_acc(g.Wr.data.data(), H, D, da.data(), x);
    kernels::ger_acc(g.Ur.data.data(), H, H, da.data(), h_prev.data());
    kernels::axpy(H, 1.0, da.data(), g.br.data());
    kernels::gemv_t_acc(p.Ur.data.data(), H, H, da.data(), dnew.data());

    dcarry = dnew;
  }
}

void lstm_direction_backward(const LstmParams& p, const Mat& features,
                             const std::vector<Vec>& h,
                             const std::vector<LstmStepCache>& caches,
                             const std::vector<Vec>& dh_ext, bool reverse,
                             LstmParams& g) {
  const std::size_t T = features.rows, D = features.cols, H = p.bi.size();
  const Vec zero(H, 0.0);
  Vec dh(H), dcarry(H, 0.0), dc(H, 0.0), da(H), dnew(H);
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? step : T - 1 - step;
    const bool boundary = reverse ? (t + 1 >= T) : (t == 0);
    const Vec& h_prev = boundary ? zero : (reverse ? h[t + 1] : h[t - 1]);
    const Vec* c_prev = boundary ? &zero
                                 : (reverse ? &caches[t + 1].c : &caches[t - 1].c);
    const LstmStepCache& c = caches[t];
    const double* x = features.data.data() + t * D;

    for (std::size_t j = 0; j < H; ++j) {
      dh[j] = dh_ext[t][j] + dcarry[j];
      dc[j] += dh[j] * c.o[j] * (1.0 - c.tanh_c[j] * c.tanh_c[j]);
    }
    std::fill(dnew.begin(), dnew.end(), 0.0);

    auto gate = [&](const Vec& act, bool tanh_gate, const auto& dgate, Mat& gW,
                    Mat& gU, Vec& gb, const Mat& U) {
      for (std::size_t j = 0; j < H; ++j) {
        const double deriv =
            tanh_gate ? (1.0 - act[j] * act[j]) : act[j] * (1.0 - act[j]);
        da[j] = dgate(j) * deriv;
      }
      kernels::ger_acc(gW.data.data(), H, D, da.data(), x);
      kernels::ger_acc(gU.data.data(), H, H, da.data(), h_prev.data());
      kernels::axpy(H, 1.0, da.data(), gb.data());
      kernels::gemv_t_acc(U.data.data(), H, H, da.data(), dnew.data());
    };

    gate(c.o, false, [&](std::size_t j) { return dh[j] * c.tanh_c[j]; },
         g.Wo, g.Uo, g.bo, p.Uo);
    gate(c.f, false, [&](std::size_t j) { return dc[j] * (*c_prev)[j]; },
         g.Wf, g.Uf, g.bf, p.Uf);
    gate(c.i, false, [&](std::size_t j) { return dc[j] * c.g[j]; },
         g.Wi, g.Ui, g.bi, p.Ui);
    gate(c.g, true, [&](std::size_t j) { return dc[j] * c.i[j]; },
         g.Wg, g.Ug, g.bg, p.Ug);

    for (std::size_t j = 0; j < H; ++j) dc[j] *= c.f[j];
    dcarry = dnew;
  }
}

} // namespace

void backward(const ModelParams& model, const Mat& features,
              const ForwardCache& cache, int label, Gradients& grads) {
  check(cache.T == features.rows && cache.T >= 1, "cache does not match features");
  check(grads.arch == model.arch, "gradient/model architecture mismatch");
  check(cache.probs.size() == model.dims.C, "cache does not match model");
  check(label >= 0 && static_cast<std::size_t>(label) < model.dims.C,
        "label out of range");
  const std::size_t T = cache.T, H = model.dims.H, K = model.state_width();

  // softmax + cross-entropy head: dlogits = probs - onehot
  Vec dlogits = cache.probs;
  dlogits[static_cast<std::size_t>(label)] -= 1.0;
  kernels::ger_acc(grads.Wout.data.data(), model.dims.C, K, dlogits.data(),
                   cache.summary.data());
  kernels::axpy(model.dims.C, 1.0, dlogits.data(), grads.bout.data());
  Vec dS(K, 0.0);
  kernels::gemv_t_acc(model.Wout.data.data(), model.dims.C, K, dlogits.data(),
                      dS.data());

  std::vector<Vec> dh_fwd(T, Vec(H, 0.0));
  std::vector<Vec> dh_bwd;
  if (is_bidirectional(model.arch)) dh_bwd.assign(T, Vec(H, 0.0));

  if (has_attention(model.arch)) {
    const std::size_t A = model.dims.A;
    // pass 1: dalpha and the softmax coupling term
    Vec dalpha(T);
    double coupling = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      dalpha[t] = kernels::dot(K, dS.data(), cache.states[t].data());
      coupling += cache.alphas[t] * dalpha[t];
    }
    // pass 2: per-timestep contributions
    Vec dpre(A), dstate(K);
    for (std::size_t t = 0; t < T; ++t) {
      const double de = cache.alphas[t] * (dalpha[t] - coupling);
      kernels::axpy(A, de, cache.u[t].data(), grads.attn.va.data());
      for (std::size_t a = 0; a < A; ++a)
        dpre[a] = de * model.attn.va[a] * (1.0 - cache.u[t][a] * cache.u[t][a]);
      kernels::ger_acc(grads.attn.Wa.data.data(), A, K, dpre.data(),
                       cache.states[t].data());
      kernels::axpy(A, 1.0, dpre.data(), grads.attn.ba.data());
      std::fill(dstate.begin(), dstate.end(), 0.0);
      kernels::axpy(K, cache.alphas[t], dS.data(), dstate.data());
      kernels::gemv_t_acc(model.attn.Wa.data.data(), A, K, dpre.data(),
                          dstate.data());
      for (std::size_t j = 0; j < H; ++j) {
        dh_fwd[t][j] += dstate[j];
        dh_bwd[t][j] += dstate[H + j];
      }
    }
  } else {
    // plain heads read h_T only
    for (std::size_t j = 0; j < H; ++j) dh_fwd[T - 1][j] = dS[j];
  }

  if (is_gru(model.arch)) {
    gru_direction_backward(model.gru_fwd, features, cache.h_fwd, cache.gru_fwd,
                           dh_fwd, false, grads.gru_fwd);
    if (is_bidirectional(model.arch))
      gru_direction_backward(model.gru_bwd, features, cache.h_bwd, cache.gru_bwd,
                             dh_bwd, true, grads.gru_bwd);
  } else {
    lstm_direction_backward(model.lstm_fwd, features, cache.h_fwd, cache.lstm_fwd,
                            dh_fwd, false, grads.lstm_fwd);
    if (is_bidirectional(model.arch))
      lstm_direction_backward(model.lstm_bwd, features, cache.h_bwd, cache.lstm_bwd,
                              dh_bwd, true, grads.lstm_bwd);
  }
}

Gradients fd_gradient(const ModelParams& model, const Mat& features, int label,
                      double epsilon) {
  check(epsilon > 0.0, "epsilon must be > 0");
  ModelParams work = model;
  Gradients grads = zeros_like(model);
  auto wrefs = param_refs(work);
  auto grefs = param_refs(grads);
  ForwardCache cache;
  for (std::size_t r = 0; r < wrefs.size(); ++r) {
    for (std::size_t i = 0; i < wrefs[r].size; ++i) {
      const double saved = wrefs[r].data[i];
      wrefs[r].data[i] = saved + epsilon;
      const double up = cross_entropy(forward(work, features, cache), label);
      wrefs[r].data[i] = saved - epsilon;
      const double down = cross_entropy(forward(work, features, cache), label);
      wrefs[r].data[i] = saved;
      grefs[r].data[i] = (up - down) / (2.0 * epsilon);
    }
  }
  return grads;
}

// ---- optimizer ----

AdamState make_adam_state(const ModelParams& model) {
  return AdamState{zeros_like(model), zeros_like(model), 0};
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& cfg) {
  auto prefs = param_refs(params);
  auto grefs = param_refs(const_cast<Gradients&>(grads));
  auto mrefs = param_refs(state.m);
  auto vrefs = param_refs(state.v);
  check(prefs.size() == grefs.size(), "gradient shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t r = 0; r < prefs.size(); ++r) {
    check(prefs[r].size == grefs[r].size, "gradient shape mismatch");
    double* p = prefs[r].data;
    const double* g = grefs[r].data;
    double* m = mrefs[r].data;
    double* v = vrefs[r].data;
    for (std::size_t i = 0; i < prefs[r].size; ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

double grad_norm(const Gradients& grads) {
  auto refs = param_refs(const_cast<Gradients&>(grads));
  double sum = 0.0;
  for (auto& r : refs) sum += kernels::dot(r.size, r.data, r.data);
  return std::sqrt(sum);
}

void clip_by_global_norm(Gradients& grads, double max_norm) {
  const double norm = grad_norm(grads);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (auto& r : param_refs(grads))
    for (std::size_t i = 0; i < r.size; ++i) r.data[i] *= scale;
}

} // namespace resp::nn
