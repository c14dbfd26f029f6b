#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "waggle/training.hpp"

namespace waggle {

/// Feed-forward network 2 -> 3 -> 3: one logistic-sigmoid hidden layer of
/// three units and a softmax output layer.
struct MlpModel {
  static constexpr std::size_t kInputs = 2;
  static constexpr std::size_t kHidden = 3;
  static constexpr std::size_t kOutputs = kNumClasses;
  static constexpr std::size_t kNumParams =
      kHidden * kInputs + kHidden + kOutputs * kHidden + kOutputs;

  std::array<std::array<double, kInputs>, kHidden> hidden_weights{};
  std::array<double, kHidden> hidden_bias{};
  std::array<std::array<double, kHidden>, kOutputs> output_weights{};
  std::array<double, kOutputs> output_bias{};
  ClassMask active{true, true, true};

  struct Activations {
    std::array<double, kHidden> hidden{};
    Scores probabilities{};
  };

  Activations forward(const FeatureVector& v) const {
    Activations a;
    for (std::size_t h = 0; h < kHidden; ++h) {
      const double z = hidden_weights[h][0] * v.x1 + hidden_weights[h][1] * v.x2 + hidden_bias[h];
      a.hidden[h] = 1.0 / (1.0 + std::exp(-z));
    }
    Scores logits{};
    for (std::size_t k = 0; k < kOutputs; ++k) {
      double z = output_bias[k];
      for (std::size_t h = 0; h < kHidden; ++h) z += output_weights[k][h] * a.hidden[h];
      logits[k] = z;
    }
    a.probabilities = detail::masked_softmax(logits, active);
    return a;
  }

  using Params = std::array<double, kNumParams>;

  // Flat layout: hidden weights (row-major), hidden bias, output weights
  // (row-major), output bias.
  Params params() const {
    Params p{};
    std::size_t i = 0;
    for (const auto& row : hidden_weights) for (double w : row) p[i++] = w;
    for (double b : hidden_bias) p[i++] = b;
    for (const auto& row : output_weights) for (double w : row) p[i++] = w;
    for (double b : output_bias) p[i++] = b;
    return p;
  }

  void set_params(const Params& p) {
    std::size_t i = 0;
    for (auto& row : hidden_weights) for (double& w : row) w = p[i++];
    for (double& b : hidden_bias) b = p[i++];
    for (auto& row : output_weights) for (double& w : row) w = p[i++];
    for (double& b : output_bias) b = p[i++];
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Mean cross-entropy and its gradient by backpropagation.
inline std::pair<double, MlpModel::Params> mlp_loss_and_gradient(const MlpModel& model,
                                                                 const Dataset& data) {
  constexpr std::size_t H = MlpModel::kHidden;
  constexpr std::size_t K = MlpModel::kOutputs;
  MlpModel grad_model;  // reused as a gradient accumulator with the same layout
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const FeatureVector v{data.x[i][0], data.x[i][1]};
    const auto a = model.forward(v);
    loss -= std::log(a.probabilities[data.y[i]]) * inv_n;

    std::array<double, K> delta_out{};
    for (std::size_t k = 0; k < K; ++k) {
      if (!model.active[k]) continue;
      delta_out[k] = (a.probabilities[k] - (data.y[i] == k ? 1.0 : 0.0)) * inv_n;
      for (std::size_t h = 0; h < H; ++h) grad_model.output_weights[k][h] += delta_out[k] * a.hidden[h];
      grad_model.output_bias[k] += delta_out[k];
    }
    for (std::size_t h = 0; h < H; ++h) {
      double back = 0.0;
      for (std::size_t k = 0; k < K; ++k) back += delta_out[k] * model.output_weights[k][h];
      const double delta_h = back * a.hidden[h] * (1.0 - a.hidden[h]);
      grad_model.hidden_weights[h][0] += delta_h * v.x1;
      grad_model.hidden_weights[h][1] += delta_h * v.x2;
      grad_model.hidden_bias[h] += delta_h;
    }
  }
  return {loss, grad_model.params()};
}

/// Weights drawn uniformly from [-0.5, 0.5] in flat-parameter order.
inline MlpModel init_mlp(std::uint64_t seed, const ClassMask& active = {true, true, true}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  MlpModel::Params p{};
  for (double& w : p) w = dist(rng);
  MlpModel model;
  model.set_params(p);
  model.active = active;
  return model;
}

/// Full-batch backpropagation with momentum; deterministic given the seed.
inline MlpModel train_mlp(const FeatureTable& table, const TrainConfig& cfg,
                          std::vector<double>* loss_history = nullptr) {
  cfg.validate();
  const Dataset data = Dataset::from_table(table);
  const MlpParams& hp = cfg.mlp;
  MlpModel model = init_mlp(cfg.seed, data.present);
  auto theta = model.params();
  MlpModel::Params velocity{};
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    model.set_params(theta);
    const auto [loss, grad] = mlp_loss_and_gradient(model, data);
    if (loss_history) loss_history->push_back(loss);
    for (std::size_t p = 0; p < theta.size(); ++p) {
      velocity[p] = hp.momentum * velocity[p] - hp.learning_rate * grad[p];
      theta[p] += velocity[p];
    }
  }
  model.set_params(theta);
  return model;
}

inline Prediction predict(const MlpModel& model, const FeatureVector& v) {
  detail::check_input(v);
  const Scores p = model.forward(v).probabilities;
  return Prediction{label_at(detail::argmax(p)), p, {}};
}

}  // namespace waggle
