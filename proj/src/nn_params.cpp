#include <cmath>

#include "emocorr/errors.hpp"
#include "emocorr/nn.hpp"
#include "emocorr/random.hpp"

namespace emocorr::nn {

namespace {

LstmParams lstm_zeros(std::size_t in, std::size_t hidden) {
  return LstmParams{Matrix(4 * hidden, in), Matrix(4 * hidden, hidden), Matrix(4 * hidden, 1)};
}

void fill_uniform(Matrix& m, std::size_t fan_in, Rng& rng) {
  const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : m.values()) v = rng.uniform(-r, r);
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, std::string_view name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError("tensor " + std::string(name) + " has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

ModelParams ModelParams::zeros(ModelVariant variant, const Dimensions& dims) {
  ModelParams p;
  p.variant = variant;
  p.dims = dims;
  p.embedding = Matrix(dims.vocab, dims.embedding);
  p.conv_weights = Matrix(dims.conv, kWindow * dims.embedding);
  p.conv_bias = Matrix(dims.conv, 1);
  p.lstm1 = lstm_zeros(dims.conv, dims.hidden1);
  p.lstm2 = lstm_zeros(dims.hidden1, dims.hidden2);
  p.output_weights = Matrix(kClasses, dims.hidden2);
  p.output_bias = Matrix(kClasses, 1);
  if (variant == ModelVariant::kM2) {
    p.stack_weights = Matrix(dims.hidden2, dims.embedding);
    p.stack_bias = Matrix(dims.hidden2, 1);
  }
  return p;
}

std::vector<TensorRef> ModelParams::tensors() {
  std::vector<TensorRef> out = {
      {"embedding", &embedding},
      {"conv_weights", &conv_weights},
      {"conv_bias", &conv_bias},
      {"lstm1_input_weights", &lstm1.input_weights},
      {"lstm1_recurrent_weights", &lstm1.recurrent_weights},
      {"lstm1_bias", &lstm1.bias},
      {"lstm2_input_weights", &lstm2.input_weights},
      {"lstm2_recurrent_weights", &lstm2.recurrent_weights},
      {"lstm2_bias", &lstm2.bias},
      {"output_weights", &output_weights},
      {"output_bias", &output_bias},
  };
  if (variant == ModelVariant::kM2) {
    out.push_back({"stack_weights", &stack_weights});
    out.push_back({"stack_bias", &stack_bias});
  }
  return out;
}

std::vector<ConstTensorRef> ModelParams::tensors() const {
  std::vector<ConstTensorRef> out;
  for (auto t : const_cast<ModelParams*>(this)->tensors()) out.push_back({t.name, t.tensor});
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.tensor->size();
  return n;
}

void ModelParams::validate() const {
  if (dims.vocab == 0 || dims.embedding == 0 || dims.conv == 0 || dims.hidden1 == 0 ||
      dims.hidden2 == 0) {
    throw ConfigError("all model dimensions must be positive");
  }
  const ModelParams expected = zeros(variant, dims);
  check_shape(stack_weights, expected.stack_weights.rows(), expected.stack_weights.cols(),
              "stack_weights");
  check_shape(stack_bias, expected.stack_bias.rows(), expected.stack_bias.cols(),
              "stack_bias");
  const auto want = expected.tensors();
  const auto have = tensors();
  for (std::size_t i = 0; i < want.size(); ++i) {
    check_shape(*have[i].tensor, want[i].tensor->rows(), want[i].tensor->cols(),
                have[i].name);
  }
}

ModelParams init_params(ModelVariant variant, const Dimensions& dims, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(variant, dims);
  p.validate();
  Rng rng(seed);
  fill_uniform(p.embedding, 1, rng);
  fill_uniform(p.conv_weights, kWindow * dims.embedding, rng);
  fill_uniform(p.lstm1.input_weights, dims.conv, rng);
  fill_uniform(p.lstm1.recurrent_weights, dims.hidden1, rng);
  fill_uniform(p.lstm2.input_weights, dims.hidden1, rng);
  fill_uniform(p.lstm2.recurrent_weights, dims.hidden2, rng);
  fill_uniform(p.output_weights, dims.hidden2, rng);
  if (variant == ModelVariant::kM2) fill_uniform(p.stack_weights, dims.embedding, rng);
  return p;
}

}  // namespace emocorr::nn
