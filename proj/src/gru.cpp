#include "avse/gru.hpp"

#include <cmath>
#include <string>

#include "avse/error.hpp"
#include "avse/random.hpp"

namespace avse {

namespace {

void expect_size(const std::vector<float>& v, std::size_t n, const std::string& field) {
  if (v.size() != n) {
    throw InvalidWeights("weights field '" + field + "' has " + std::to_string(v.size()) +
                         " values, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InvalidWeights("weights field '" + field + "' has a non-finite value at index " +
                           std::to_string(i));
    }
  }
}

Eigen::MatrixXd to_matrix(const std::vector<float>& v, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v[r * cols + c];
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<float>& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::size_t GruPostfilterWeights::layer_input_dim(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden_dim;
}

void GruPostfilterWeights::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || num_layers == 0 || output_dim == 0) {
    throw InvalidWeights("weights dimensions must be positive (input_dim " +
                         std::to_string(input_dim) + ", hidden_dim " +
                         std::to_string(hidden_dim) + ", num_layers " +
                         std::to_string(num_layers) + ", output_dim " +
                         std::to_string(output_dim) + ")");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidWeights("weights field 'epsilon' must be positive and finite");
  }
  expect_size(feature_mean, input_dim, "norm.mean");
  expect_size(feature_std, input_dim, "norm.std");
  for (std::size_t i = 0; i < feature_std.size(); ++i) {
    if (!(feature_std[i] > 0.0f)) {
      throw InvalidWeights("weights field 'norm.std' must be > 0 (index " + std::to_string(i) +
                           ")");
    }
  }
  if (layers.size() != num_layers) {
    throw InvalidWeights("weights declare " + std::to_string(num_layers) + " layers but hold " +
                         std::to_string(layers.size()));
  }
  const std::size_t g = 3 * hidden_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string p = "gru.l" + std::to_string(i) + ".";
    expect_size(layers[i].weight_ih, g * layer_input_dim(i), p + "weight_ih");
    expect_size(layers[i].weight_hh, g * hidden_dim, p + "weight_hh");
    expect_size(layers[i].bias_ih, g, p + "bias_ih");
    expect_size(layers[i].bias_hh, g, p + "bias_hh");
  }
  expect_size(head_weight, output_dim * hidden_dim, "head.weight");
  expect_size(head_bias, output_dim, "head.bias");
}

GruPostfilterWeights GruPostfilterWeights::zeros(std::size_t input_dim, std::size_t hidden_dim,
                                                 std::size_t num_layers,
                                                 std::size_t output_dim) {
  GruPostfilterWeights w;
  w.input_dim = input_dim;
  w.hidden_dim = hidden_dim;
  w.num_layers = num_layers;
  w.output_dim = output_dim;
  w.feature_mean.assign(input_dim, 0.0f);
  w.feature_std.assign(input_dim, 1.0f);
  const std::size_t g = 3 * hidden_dim;
  for (std::size_t i = 0; i < num_layers; ++i) {
    GruLayerWeights layer;
    layer.weight_ih.assign(g * w.layer_input_dim(i), 0.0f);
    layer.weight_hh.assign(g * hidden_dim, 0.0f);
    layer.bias_ih.assign(g, 0.0f);
    layer.bias_hh.assign(g, 0.0f);
    w.layers.push_back(std::move(layer));
  }
  w.head_weight.assign(output_dim * hidden_dim, 0.0f);
  w.head_bias.assign(output_dim, 0.0f);
  return w;
}

GruPostfilterWeights GruPostfilterWeights::random(std::size_t input_dim, std::size_t hidden_dim,
                                                  std::size_t num_layers,
                                                  std::size_t output_dim, std::uint64_t seed) {
  auto w = zeros(input_dim, hidden_dim, num_layers, output_dim);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  auto fill = [&](std::vector<float>& v) {
    for (auto& x : v) x = static_cast<float>(rng.uniform(-bound, bound));
  };
  for (auto& layer : w.layers) {
    fill(layer.weight_ih);
    fill(layer.weight_hh);
    fill(layer.bias_ih);
    fill(layer.bias_hh);
  }
  fill(w.head_weight);
  fill(w.head_bias);
  return w;
}

GruPostfilterWeights GruPostfilterWeights::zeros_for(const StftConfig& config,
                                                     std::size_t hidden_dim,
                                                     std::size_t num_layers) {
  return zeros(2 * config.bins(), hidden_dim, num_layers, config.bins());
}

GruPostfilter::GruPostfilter(GruPostfilterWeights weights) : weights_(std::move(weights)) {
  weights_.validate();
  const std::size_t h = weights_.hidden_dim;
  for (std::size_t i = 0; i < weights_.num_layers; ++i) {
    const auto& src = weights_.layers[i];
    layers_.push_back({to_matrix(src.weight_ih, 3 * h, weights_.layer_input_dim(i)),
                       to_matrix(src.weight_hh, 3 * h, h), to_vector(src.bias_ih),
                       to_vector(src.bias_hh)});
  }
  head_w_ = to_matrix(weights_.head_weight, weights_.output_dim, h);
  head_b_ = to_vector(weights_.head_bias);
  mean_.assign(weights_.feature_mean.begin(), weights_.feature_mean.end());
  inv_std_.reserve(weights_.input_dim);
  for (float s : weights_.feature_std) inv_std_.push_back(1.0 / static_cast<double>(s));
}

void GruPostfilter::normalize(std::span<const double> raw, std::span<double> out) const {
  if (raw.size() != mean_.size() || out.size() != mean_.size()) {
    throw InvalidWeights("feature frame has " + std::to_string(raw.size()) +
                         " values, model expects " + std::to_string(mean_.size()));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean_[i]) * inv_std_[i];
}

GruState::GruState(const GruPostfilter& model) : model_(&model) {
  const std::size_t h = model.weights_.hidden_dim;
  hidden_.assign(model.layers_.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h)));
  input_.resize(static_cast<Eigen::Index>(model.input_dim()));
  gi_.resize(static_cast<Eigen::Index>(3 * h));
  gh_.resize(static_cast<Eigen::Index>(3 * h));
  out_.resize(static_cast<Eigen::Index>(model.output_dim()));
}

void GruState::reset() {
  for (auto& h : hidden_) h.setZero();
}

void GruState::step(std::span<const double> feature, std::span<double> mask) {
  const auto& model = *model_;
  if (feature.size() != model.input_dim()) {
    throw InvalidWeights("feature frame has " + std::to_string(feature.size()) +
                         " values, model expects " + std::to_string(model.input_dim()));
  }
  if (mask.size() != model.output_dim()) {
    throw InvalidWeights("mask frame has " + std::to_string(mask.size()) +
                         " values, model produces " + std::to_string(model.output_dim()));
  }
  const auto h = static_cast<Eigen::Index>(model.weights_.hidden_dim);
  for (Eigen::Index i = 0; i < input_.size(); ++i) input_(i) = feature[static_cast<std::size_t>(i)];

  const Eigen::VectorXd* x = &input_;
  for (std::size_t i = 0; i < model.layers_.size(); ++i) {
    const auto& layer = model.layers_[i];
    auto& state = hidden_[i];
    gi_.noalias() = layer.w_ih * (*x);
    gi_ += layer.b_ih;
    gh_.noalias() = layer.w_hh * state;
    gh_ += layer.b_hh;
    for (Eigen::Index j = 0; j < h; ++j) {
      const double r = sigmoid(gi_(j) + gh_(j));
      const double z = sigmoid(gi_(h + j) + gh_(h + j));
      const double n = std::tanh(gi_(2 * h + j) + r * gh_(2 * h + j));
      state(j) = (1.0 - z) * n + z * state(j);
    }
    x = &state;
  }
  out_.noalias() = model.head_w_ * (*x);
  out_ += model.head_b_;
  for (Eigen::Index k = 0; k < out_.size(); ++k) {
    mask[static_cast<std::size_t>(k)] = sigmoid(out_(k));
  }
}

std::vector<double> GruState::step(std::span<const double> feature) {
  std::vector<double> mask(model_->output_dim());
  step(feature, mask);
  return mask;
}

TfGrid<double> make_features(const ComplexSpectrogram& beam, const PowerSpectrogram& total_power,
                             const GruPostfilter& model) {
  if (2 * beam.bins() != model.input_dim()) {
    throw InvalidWeights("model input_dim " + std::to_string(model.input_dim()) +
                         " does not match 2 x " + std::to_string(beam.bins()) + " bins");
  }
  auto features = raw_features(beam, total_power, model.weights().epsilon);
  for (std::size_t l = 0; l < features.frames(); ++l) {
    model.normalize(features.frame(l), features.frame(l));
  }
  return features;
}

MaskSpectrogram gru_infer(const TfGrid<double>& features, const GruPostfilter& model) {
  if (features.bins() != model.input_dim()) {
    throw InvalidWeights("features have " + std::to_string(features.bins()) +
                         " values per frame, model expects " + std::to_string(model.input_dim()));
  }
  MaskSpectrogram mask(features.frames(), model.output_dim());
  GruState state(model);
  for (std::size_t l = 0; l < features.frames(); ++l) state.step(features.frame(l), mask.frame(l));
  return mask;
}

}  // namespace avse
