// Causal GRU mask estimator: stacked unidirectional GRU layers, a linear head
// and a sigmoid, with per-feature input normalization.
//
// Recurrence per layer (gate order reset | update | candidate):
//   r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   z  = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//   n  = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
// Hidden state starts at zero; layer i+1 consumes the hidden state of layer i.
#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avse/postfilter.hpp"
#include "avse/stft.hpp"
#include "avse/tf_grid.hpp"

namespace avse {

struct GruLayerWeights {
  std::vector<float> weight_ih;  // 3H x in, row-major
  std::vector<float> weight_hh;  // 3H x H
  std::vector<float> bias_ih;    // 3H
  std::vector<float> bias_hh;    // 3H

  friend bool operator==(const GruLayerWeights&, const GruLayerWeights&) = default;
};

struct GruPostfilterWeights {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_layers = 0;
  std::size_t output_dim = 0;
  double epsilon = kLogFloor;
  std::vector<float> feature_mean;  // input_dim
  std::vector<float> feature_std;   // input_dim, > 0
  std::vector<GruLayerWeights> layers;
  std::vector<float> head_weight;  // output_dim x H
  std::vector<float> head_bias;    // output_dim

  // Layer i input width: input_dim for i = 0, hidden_dim afterwards.
  std::size_t layer_input_dim(std::size_t layer) const;

  // Throws InvalidWeights naming the first inconsistent field.
  void validate() const;

  // Every weight and bias zero, identity normalization (mean 0, std 1).
  static GruPostfilterWeights zeros(std::size_t input_dim, std::size_t hidden_dim,
                                    std::size_t num_layers, std::size_t output_dim);
  // Uniform(-1/sqrt(H), 1/sqrt(H)) parameters, identity normalization.
  static GruPostfilterWeights random(std::size_t input_dim, std::size_t hidden_dim,
                                     std::size_t num_layers, std::size_t output_dim,
                                     std::uint64_t seed);
  // Dimensions used by the enhancement pipeline: 2*(N/2+1) -> H -> N/2+1.
  static GruPostfilterWeights zeros_for(const StftConfig& config, std::size_t hidden_dim = 512,
                                        std::size_t num_layers = 2);

  friend bool operator==(const GruPostfilterWeights&, const GruPostfilterWeights&) = default;
};

// Immutable inference model: weights widened to double. Safe to share across
// threads; each stream keeps its own GruState.
class GruPostfilter {
 public:
  explicit GruPostfilter(GruPostfilterWeights weights);

  const GruPostfilterWeights& weights() const { return weights_; }
  std::size_t input_dim() const { return weights_.input_dim; }
  std::size_t output_dim() const { return weights_.output_dim; }

  // (raw - mean) / std
  void normalize(std::span<const double> raw, std::span<double> out) const;

 private:
  friend class GruState;

  struct Layer {
    Eigen::MatrixXd w_ih;
    Eigen::MatrixXd w_hh;
    Eigen::VectorXd b_ih;
    Eigen::VectorXd b_hh;
  };

  GruPostfilterWeights weights_;
  std::vector<Layer> layers_;
  Eigen::MatrixXd head_w_;
  Eigen::VectorXd head_b_;
  std::vector<double> mean_;
  std::vector<double> inv_std_;
};

// Streaming inference: one normalized feature frame in, one mask frame out.
class GruState {
 public:
  explicit GruState(const GruPostfilter& model);

  void step(std::span<const double> feature, std::span<double> mask);
  std::vector<double> step(std::span<const double> feature);
  void reset();

 private:
  const GruPostfilter* model_;
  std::vector<Eigen::VectorXd> hidden_;
  Eigen::VectorXd input_;
  Eigen::VectorXd gi_;
  Eigen::VectorXd gh_;
  Eigen::VectorXd out_;
};

// Normalized network inputs for every frame.
TfGrid<double> make_features(const ComplexSpectrogram& beam, const PowerSpectrogram& total_power,
                             const GruPostfilter& model);

// Runs GruState over all frames from a zero state.
MaskSpectrogram gru_infer(const TfGrid<double>& features, const GruPostfilter& model);

}  // namespace avse
