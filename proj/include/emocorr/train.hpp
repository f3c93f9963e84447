#ifndef EMOCORR_TRAIN_HPP
#define EMOCORR_TRAIN_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "emocorr/emotion.hpp"
#include "emocorr/nn.hpp"

namespace emocorr::nn {

enum class Optimizer : std::uint8_t { kSgd, kMomentum };

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double dropout = 0.0;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::kSgd;
  double momentum = 0.9;
  // Rescale the mean batch gradient to at most this L2 norm; 0 disables.
  double clip_norm = 0.0;
  // `vocab` is overridden by the vocabulary being trained on.
  Dimensions dims;

  void validate() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean per-sample loss of each epoch
};

// Minibatch first-order training of the summed cross-entropy. Each step uses
// the batch-mean gradient. Initialisation, shuffling and dropout all derive
// from config.seed. Throws DivergenceError when an epoch loss is not finite.
TrainResult train(std::span<const Example> train_set, const TrainConfig& config,
                  ModelVariant variant, std::size_t vocab_size);

struct PredictionRecord {
  Emotion truth = Emotion::kLove;
  Emotion predicted = Emotion::kLove;
  std::array<double, kClasses> probs{};
};

struct Evaluation {
  // counts[true][predicted]
  CountMatrix counts{};
  double accuracy = 0.0;
  std::vector<PredictionRecord> predictions;
};

Evaluation evaluate_confusion_counts(const ModelParams& params,
                                     std::span<const Example> test_set);

}  // namespace emocorr::nn

#endif  // EMOCORR_TRAIN_HPP
