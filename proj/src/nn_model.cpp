#include <algorithm>
#include <cmath>
#include <limits>

#include "emocorr/errors.hpp"
#include "emocorr/nn.hpp"
#include "emocorr/random.hpp"

namespace emocorr::nn {

namespace {

using Vec = std::vector<double>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out += m * x
void gemv_add(const Matrix& m, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += row[c] * x[c];
    out[r] += s;
  }
}

// out += m^T * y
void gemv_t_add(const Matrix& m, std::span<const double> y, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * yr;
  }
}

// m += y x^T
void outer_add(Matrix& m, std::span<const double> y, std::span<const double> x) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += yr * x[c];
  }
}

void add_to(Matrix& bias, std::span<const double> v) {
  auto b = bias.values();
  for (std::size_t i = 0; i < v.size(); ++i) b[i] += v[i];
}

void check_inputs(const FeatureSequence& seq, const ModelParams& params) {
  if (seq.tokens.empty()) throw ConfigError("empty feature sequence");
  if (seq.mask.size() != seq.tokens.size()) {
    throw ConfigError("feature sequence mask length differs from token length");
  }
  if (params.embedding.rows() != params.dims.vocab ||
      params.embedding.cols() != params.dims.embedding ||
      params.conv_weights.cols() != kWindow * params.dims.embedding ||
      params.lstm1.input_weights.cols() != params.dims.conv ||
      params.lstm2.input_weights.cols() != params.dims.hidden1 ||
      params.output_weights.cols() != params.dims.hidden2) {
    throw ConfigError("model parameters are inconsistent with their dimensions");
  }
  if (params.variant == ModelVariant::kM2 &&
      (params.stack_weights.rows() != params.dims.hidden2 ||
       params.stack_weights.cols() != params.dims.embedding)) {
    throw ConfigError("M2 stack branch is missing or mis-shaped");
  }
  for (auto id : seq.tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= params.dims.vocab) {
      throw ConfigError("token id " + std::to_string(id) + " outside vocabulary of size " +
                        std::to_string(params.dims.vocab));
    }
  }
}

struct LstmRun {
  std::vector<Vec> h, c, gates;
};

LstmRun run_lstm(const std::vector<Vec>& inputs, const LstmParams& p) {
  const std::size_t hidden = p.hidden();
  LstmRun run;
  LstmStep state{Vec(hidden, 0.0), Vec(hidden, 0.0)};
  Vec pre(4 * hidden);
  for (const auto& x : inputs) {
    std::copy(p.bias.values().begin(), p.bias.values().end(), pre.begin());
    gemv_add(p.input_weights, x, pre);
    gemv_add(p.recurrent_weights, state.h, pre);
    Vec gates(4 * hidden);
    for (std::size_t k = 0; k < 3 * hidden; ++k) gates[k] = sigmoid(pre[k]);
    for (std::size_t k = 3 * hidden; k < 4 * hidden; ++k) gates[k] = std::tanh(pre[k]);
    for (std::size_t k = 0; k < hidden; ++k) {
      state.c[k] = gates[hidden + k] * state.c[k] + gates[k] * gates[3 * hidden + k];
      state.h[k] = gates[2 * hidden + k] * std::tanh(state.c[k]);
    }
    run.h.push_back(state.h);
    run.c.push_back(state.c);
    run.gates.push_back(std::move(gates));
  }
  return run;
}

// Back-propagation through time. Accumulates parameter gradients into `g` and
// returns the gradient with respect to each input.
std::vector<Vec> lstm_backward(const std::vector<Vec>& inputs, const std::vector<Vec>& h,
                               const std::vector<Vec>& c, const std::vector<Vec>& gates,
                               const std::vector<Vec>& d_out, const LstmParams& p,
                               LstmParams& g) {
  const std::size_t hidden = p.hidden();
  const std::size_t n = inputs.size();
  std::vector<Vec> d_in(n, Vec(p.input_weights.cols(), 0.0));
  Vec dh_next(hidden, 0.0), dc_next(hidden, 0.0), dpre(4 * hidden);
  const Vec zeros(hidden, 0.0);
  for (std::size_t t = n; t-- > 0;) {
    const Vec& c_prev = t > 0 ? c[t - 1] : zeros;
    const Vec& h_prev = t > 0 ? h[t - 1] : zeros;
    const Vec& gt = gates[t];
    for (std::size_t k = 0; k < hidden; ++k) {
      const double ig = gt[k], fg = gt[hidden + k], og = gt[2 * hidden + k],
                   cand = gt[3 * hidden + k];
      const double tc = std::tanh(c[t][k]);
      const double dh = d_out[t][k] + dh_next[k];
      const double dc = dh * og * (1.0 - tc * tc) + dc_next[k];
      dpre[k] = dc * cand * ig * (1.0 - ig);
      dpre[hidden + k] = dc * c_prev[k] * fg * (1.0 - fg);
      dpre[2 * hidden + k] = dh * tc * og * (1.0 - og);
      dpre[3 * hidden + k] = dc * ig * (1.0 - cand * cand);
      dc_next[k] = dc * fg;
    }
    outer_add(g.input_weights, dpre, inputs[t]);
    outer_add(g.recurrent_weights, dpre, h_prev);
    add_to(g.bias, dpre);
    gemv_t_add(p.input_weights, dpre, d_in[t]);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    gemv_t_add(p.recurrent_weights, dpre, dh_next);
  }
  return d_in;
}

}  // namespace

LstmStep lstm_step(std::span<const double> x, const LstmStep& state, const LstmParams& p) {
  const std::size_t hidden = p.hidden();
  if (x.size() != p.input_weights.cols() || state.h.size() != hidden ||
      state.c.size() != hidden) {
    throw ConfigError("lstm_step: dimension mismatch");
  }
  Vec pre(p.bias.values().begin(), p.bias.values().end());
  gemv_add(p.input_weights, x, pre);
  gemv_add(p.recurrent_weights, state.h, pre);
  LstmStep next{Vec(hidden), Vec(hidden)};
  for (std::size_t k = 0; k < hidden; ++k) {
    const double ig = sigmoid(pre[k]);
    const double fg = sigmoid(pre[hidden + k]);
    const double og = sigmoid(pre[2 * hidden + k]);
    const double cand = std::tanh(pre[3 * hidden + k]);
    next.c[k] = fg * state.c[k] + ig * cand;
    next.h[k] = og * std::tanh(next.c[k]);
  }
  return next;
}

std::vector<double> masked_average(const std::vector<std::vector<double>>& seq,
                                   std::span<const std::uint8_t> mask) {
  if (seq.size() != mask.size()) throw ConfigError("masked_average: length mismatch");
  if (seq.empty()) return {};
  Vec out(seq.front().size(), 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!mask[i]) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += seq[i][k];
  }
  const double n = static_cast<double>(seq.size());
  for (auto& v : out) v /= n;
  return out;
}

void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

Emotion ForwardTrace::predicted() const {
  return emotion_at(static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin()));
}

ForwardTrace forward(const FeatureSequence& seq, const ModelParams& params, Mode mode,
                     const Dropout& dropout) {
  check_inputs(seq, params);
  if (!(dropout.rate >= 0.0 && dropout.rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1)");
  }
  const auto& d = params.dims;
  const std::size_t n = seq.length();
  ForwardTrace tr;

  tr.z.reserve(n);
  for (auto id : seq.tokens) {
    const auto row = params.embedding.row(static_cast<std::size_t>(id));
    tr.z.emplace_back(row.begin(), row.end());
  }
  const auto pad = params.embedding.row(Vocabulary::kPadId);

  // Window of 5 centred on each position; out-of-range neighbours are "none".
  Vec window(kWindow * d.embedding);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < kWindow; ++w) {
      const auto pos = static_cast<std::ptrdiff_t>(i + w) - 2;
      const bool inside = pos >= 0 && pos < static_cast<std::ptrdiff_t>(n);
      const double* src = inside ? tr.z[static_cast<std::size_t>(pos)].data() : pad.data();
      std::copy(src, src + d.embedding, window.begin() + static_cast<std::ptrdiff_t>(w * d.embedding));
    }
    Vec a(params.conv_bias.values().begin(), params.conv_bias.values().end());
    gemv_add(params.conv_weights, window, a);
    Vec r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] > 0.0 ? a[k] : 0.0;
    tr.h1.push_back(std::move(a));
    tr.h2.push_back(std::move(r));
  }

  auto l1 = run_lstm(tr.h2, params.lstm1);
  tr.h3 = std::move(l1.h);
  tr.c3 = std::move(l1.c);
  tr.gates3 = std::move(l1.gates);
  auto l2 = run_lstm(tr.h3, params.lstm2);
  tr.h4 = std::move(l2.h);
  tr.c4 = std::move(l2.c);
  tr.gates4 = std::move(l2.gates);

  tr.keep.assign(n, Vec(d.hidden2, 1.0));
  if (mode == Mode::kTrain && dropout.rate > 0.0) {
    Rng rng(dropout.seed);
    const double scale = 1.0 / (1.0 - dropout.rate);
    for (auto& row : tr.keep) {
      for (auto& k : row) k = rng.uniform01() < dropout.rate ? 0.0 : scale;
    }
  }
  tr.h5 = tr.h4;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d.hidden2; ++k) tr.h5[i][k] *= tr.keep[i][k];
  }

  tr.h6 = masked_average(tr.h5, seq.mask);
  if (params.variant == ModelVariant::kM2) {
    for (std::size_t i = 0; i < n; ++i) {
      Vec lin(params.stack_bias.values().begin(), params.stack_bias.values().end());
      gemv_add(params.stack_weights, tr.z[i], lin);
      Vec sig(lin.size());
      for (std::size_t k = 0; k < lin.size(); ++k) sig[k] = sigmoid(lin[k]);
      tr.h8.push_back(std::move(lin));
      tr.h9.push_back(std::move(sig));
    }
    const Vec stack = masked_average(tr.h9, seq.mask);
    for (std::size_t k = 0; k < d.hidden2; ++k) tr.h6[k] += stack[k];
  }

  std::copy(params.output_bias.values().begin(), params.output_bias.values().end(),
            tr.h7.begin());
  gemv_add(params.output_weights, tr.h6, tr.h7);
  tr.probs = tr.h7;
  softmax_inplace(tr.probs);
  return tr;
}

double cross_entropy_loss(std::span<const std::array<double, kClasses>> probs,
                          std::span<const Emotion> labels) {
  if (probs.size() != labels.size()) throw ConfigError("cross_entropy_loss: size mismatch");
  double loss = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) loss -= std::log(probs[j][idx(labels[j])]);
  return loss;
}

double backward(const FeatureSequence& seq, const ForwardTrace& tr, const ModelParams& params,
                Emotion label, ModelParams& grads) {
  const auto& d = params.dims;
  const std::size_t n = seq.length();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::array<double, kClasses> dh7 = tr.probs;
  dh7[idx(label)] -= 1.0;
  outer_add(grads.output_weights, dh7, tr.h6);
  add_to(grads.output_bias, dh7);
  Vec dh6(d.hidden2, 0.0);
  gemv_t_add(params.output_weights, dh7, dh6);

  std::vector<Vec> dz(n, Vec(d.embedding, 0.0));

  if (params.variant == ModelVariant::kM2) {
    Vec dh8(d.hidden2);
    for (std::size_t i = 0; i < n; ++i) {
      if (!seq.mask[i]) continue;
      for (std::size_t k = 0; k < d.hidden2; ++k) {
        const double s = tr.h9[i][k];
        dh8[k] = dh6[k] * inv_n * s * (1.0 - s);
      }
      outer_add(grads.stack_weights, dh8, tr.z[i]);
      add_to(grads.stack_bias, dh8);
      gemv_t_add(params.stack_weights, dh8, dz[i]);
    }
  }

  std::vector<Vec> dh4(n, Vec(d.hidden2, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (!seq.mask[i]) continue;
    for (std::size_t k = 0; k < d.hidden2; ++k) dh4[i][k] = dh6[k] * inv_n * tr.keep[i][k];
  }

  const auto dh3 = lstm_backward(tr.h3, tr.h4, tr.c4, tr.gates4, dh4, params.lstm2,
                                 grads.lstm2);
  const auto dh2 = lstm_backward(tr.h2, tr.h3, tr.c3, tr.gates3, dh3, params.lstm1,
                                 grads.lstm1);

  const auto pad = params.embedding.row(Vocabulary::kPadId);
  Vec window(kWindow * d.embedding);
  Vec dwindow(kWindow * d.embedding);
  Vec dpad(d.embedding, 0.0);
  Vec da1(d.conv);
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t k = 0; k < d.conv; ++k) {
      da1[k] = tr.h1[i][k] > 0.0 ? dh2[i][k] : 0.0;
      any = any || da1[k] != 0.0;
    }
    if (!any) continue;
    for (std::size_t w = 0; w < kWindow; ++w) {
      const auto pos = static_cast<std::ptrdiff_t>(i + w) - 2;
      const bool inside = pos >= 0 && pos < static_cast<std::ptrdiff_t>(n);
      const double* src = inside ? tr.z[static_cast<std::size_t>(pos)].data() : pad.data();
      std::copy(src, src + d.embedding, window.begin() + static_cast<std::ptrdiff_t>(w * d.embedding));
    }
    outer_add(grads.conv_weights, da1, window);
    add_to(grads.conv_bias, da1);
    std::fill(dwindow.begin(), dwindow.end(), 0.0);
    gemv_t_add(params.conv_weights, da1, dwindow);
    for (std::size_t w = 0; w < kWindow; ++w) {
      const auto pos = static_cast<std::ptrdiff_t>(i + w) - 2;
      const bool inside = pos >= 0 && pos < static_cast<std::ptrdiff_t>(n);
      Vec& dst = inside ? dz[static_cast<std::size_t>(pos)] : dpad;
      for (std::size_t e = 0; e < d.embedding; ++e) dst[e] += dwindow[w * d.embedding + e];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto row = grads.embedding.row(static_cast<std::size_t>(seq.tokens[i]));
    for (std::size_t e = 0; e < d.embedding; ++e) row[e] += dz[i][e];
  }
  auto pad_row = grads.embedding.row(Vocabulary::kPadId);
  for (std::size_t e = 0; e < d.embedding; ++e) pad_row[e] += dpad[e];

  return -std::log(tr.probs[idx(label)]);
}

double batch_loss_and_gradients(std::span<const Example> batch, const ModelParams& params,
                                Mode mode, const Dropout& dropout, ModelParams& grads) {
  double loss = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const Dropout sample{dropout.rate, mix_seed(dropout.seed, k)};
    const auto tr = forward(batch[k].seq, params, mode, sample);
    loss += backward(batch[k].seq, tr, params, batch[k].label, grads);
  }
  return loss;
}

double batch_loss(std::span<const Example> batch, const ModelParams& params, Mode mode,
                  const Dropout& dropout) {
  double loss = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const Dropout sample{dropout.rate, mix_seed(dropout.seed, k)};
    const auto tr = forward(batch[k].seq, params, mode, sample);
    loss -= std::log(tr.probs[idx(batch[k].label)]);
  }
  return loss;
}

Emotion predict(const FeatureSequence& seq, const ModelParams& params) {
  return forward(seq, params, Mode::kEval).predicted();
}

}  // namespace emocorr::nn
