#include <algorithm>
#include <cmath>
#include <numeric>

#include "emocorr/errors.hpp"
#include "emocorr/random.hpp"
#include "emocorr/train.hpp"

namespace emocorr::nn {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (optimizer == Optimizer::kMomentum && !(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (clip_norm < 0.0) throw ConfigError("clip norm must be non-negative");
}

namespace {

void zero(ModelParams& p) {
  for (auto t : p.tensors()) std::fill(t.tensor->values().begin(), t.tensor->values().end(), 0.0);
}

}  // namespace

TrainResult train(std::span<const Example> train_set, const TrainConfig& config,
                  ModelVariant variant, std::size_t vocab_size) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  Dimensions dims = config.dims;
  dims.vocab = vocab_size;

  TrainResult result{init_params(variant, dims, mix_seed(config.seed, 0x1417)), {}};
  ModelParams& params = result.params;
  ModelParams grads = ModelParams::zeros(variant, dims);
  ModelParams velocity = ModelParams::zeros(variant, dims);
  auto param_tensors = params.tensors();
  auto grad_tensors = grads.tensors();
  auto velocity_tensors = velocity.tensors();

  Rng order_rng(mix_seed(config.seed, 0x5eed));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      zero(grads);
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = train_set[order[k]];
        const Dropout dropout{config.dropout, mix_seed(config.seed, epoch * 1000003 + k)};
        const auto tr = forward(ex.seq, params, Mode::kTrain, dropout);
        epoch_loss += backward(ex.seq, tr, params, ex.label, grads);
      }

      double scale = 1.0 / static_cast<double>(stop - start);
      if (config.clip_norm > 0.0) {
        double sq = 0.0;
        for (auto t : grad_tensors) {
          for (double g : t.tensor->values()) sq += g * g;
        }
        const double norm = std::sqrt(sq) * scale;
        if (norm > config.clip_norm) scale *= config.clip_norm / norm;
      }

      for (std::size_t ti = 0; ti < param_tensors.size(); ++ti) {
        auto p = param_tensors[ti].tensor->values();
        auto g = grad_tensors[ti].tensor->values();
        if (config.optimizer == Optimizer::kSgd) {
          for (std::size_t i = 0; i < p.size(); ++i) p[i] -= config.learning_rate * scale * g[i];
        } else {
          auto v = velocity_tensors[ti].tensor->values();
          for (std::size_t i = 0; i < p.size(); ++i) {
            v[i] = config.momentum * v[i] + scale * g[i];
            p[i] -= config.learning_rate * v[i];
          }
        }
      }
    }
    epoch_loss /= static_cast<double>(train_set.size());
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError(epoch, "loss is " + std::to_string(epoch_loss));
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

Evaluation evaluate_confusion_counts(const ModelParams& params,
                                     std::span<const Example> test_set) {
  Evaluation ev;
  std::int64_t correct = 0;
  for (const auto& ex : test_set) {
    const auto tr = forward(ex.seq, params, Mode::kEval);
    const Emotion pred = tr.predicted();
    ++ev.counts[idx(ex.label)][idx(pred)];
    if (pred == ex.label) ++correct;
    ev.predictions.push_back({ex.label, pred, tr.probs});
  }
  ev.accuracy = test_set.empty() ? 0.0
                                 : static_cast<double>(correct) /
                                       static_cast<double>(test_set.size());
  return ev;
}

}  // namespace emocorr::nn
