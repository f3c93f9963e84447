#ifndef EMOCORR_NN_HPP
#define EMOCORR_NN_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emocorr/emotion.hpp"
#include "emocorr/features.hpp"

namespace emocorr::nn {

inline constexpr std::size_t kWindow = 5;
inline constexpr std::size_t kClasses = kNumEmotions;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dimensions {
  std::size_t vocab = 0;
  std::size_t embedding = 16;
  std::size_t conv = 16;     // convolution filters per position
  std::size_t hidden1 = 16;  // first LSTM layer
  std::size_t hidden2 = 16;  // second LSTM layer; also the pooled width

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

// Gate blocks are stacked in the order input, forget, output, candidate.
struct LstmParams {
  Matrix input_weights;      // 4H x in
  Matrix recurrent_weights;  // 4H x H
  Matrix bias;               // 4H x 1

  std::size_t hidden() const { return recurrent_weights.cols(); }
  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

struct TensorRef {
  std::string_view name;
  Matrix* tensor;
};

struct ConstTensorRef {
  std::string_view name;
  const Matrix* tensor;
};

// Learnable parameters of M1 or M2. Gradients use the same type.
struct ModelParams {
  ModelVariant variant = ModelVariant::kM1;
  Dimensions dims;

  Matrix embedding;     // vocab x embedding; row 0 is "none"
  Matrix conv_weights;  // conv x (kWindow * embedding)
  Matrix conv_bias;     // conv x 1
  LstmParams lstm1;
  LstmParams lstm2;
  Matrix output_weights;  // kClasses x hidden2
  Matrix output_bias;     // kClasses x 1
  // M2 only; empty for M1.
  Matrix stack_weights;  // hidden2 x embedding
  Matrix stack_bias;     // hidden2 x 1

  // Zero-valued parameters of the given shape.
  static ModelParams zeros(ModelVariant variant, const Dimensions& dims);

  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
  std::size_t parameter_count() const;

  // Throws ConfigError if any tensor disagrees with `dims` or `variant`.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Uniform in [-r, r], r = 1/sqrt(fan_in), for every weight; biases start at 0.
ModelParams init_params(ModelVariant variant, const Dimensions& dims, std::uint64_t seed);

enum class Mode : std::uint8_t { kTrain, kEval };

struct Dropout {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct LstmStep {
  std::vector<double> h;
  std::vector<double> c;
};

// One step of a standard four-gate LSTM cell.
LstmStep lstm_step(std::span<const double> x, const LstmStep& state, const LstmParams& p);

// (1/N) * sum_i seq_i * mask_i, N = seq.size().
std::vector<double> masked_average(const std::vector<std::vector<double>>& seq,
                                   std::span<const std::uint8_t> mask);

void softmax_inplace(std::span<double> v);

struct ForwardTrace {
  std::vector<std::vector<double>> z;   // embeddings
  std::vector<std::vector<double>> h1;  // convolution output
  std::vector<std::vector<double>> h2;  // ReLU
  std::vector<std::vector<double>> h3;  // LSTM layer 1
  std::vector<std::vector<double>> c3;
  std::vector<std::vector<double>> gates3;  // activated gates, 4*hidden1
  std::vector<std::vector<double>> h4;      // LSTM layer 2
  std::vector<std::vector<double>> c4;
  std::vector<std::vector<double>> gates4;
  std::vector<std::vector<double>> h5;         // after dropout
  std::vector<std::vector<double>> keep;       // dropout multipliers
  std::vector<std::vector<double>> h8;         // M2 stack branch, linear
  std::vector<std::vector<double>> h9;         // M2 stack branch, sigmoid
  std::vector<double> h6;                      // pooled
  std::array<double, kClasses> h7{};           // logits
  std::array<double, kClasses> probs{};        // softmax

  Emotion predicted() const;
};

// Dropout is applied to the second LSTM layer's output only in train mode,
// with inverted scaling.
ForwardTrace forward(const FeatureSequence& seq, const ModelParams& params, Mode mode,
                     const Dropout& dropout = {});

// -sum_j log probs_j[label_j].
double cross_entropy_loss(std::span<const std::array<double, kClasses>> probs,
                          std::span<const Emotion> labels);

// Adds d(-log probs[label]) / d(params) to `grads` and returns that loss.
double backward(const FeatureSequence& seq, const ForwardTrace& trace,
                const ModelParams& params, Emotion label, ModelParams& grads);

struct Example {
  FeatureSequence seq;
  Emotion label = Emotion::kLove;
};

// Summed loss and gradients over `batch`. In train mode sample k uses dropout
// seed mix_seed(dropout.seed, k).
double batch_loss_and_gradients(std::span<const Example> batch, const ModelParams& params,
                                Mode mode, const Dropout& dropout, ModelParams& grads);
double batch_loss(std::span<const Example> batch, const ModelParams& params, Mode mode,
                  const Dropout& dropout);

Emotion predict(const FeatureSequence& seq, const ModelParams& params);

}  // namespace emocorr::nn

#endif  // EMOCORR_NN_HPP
