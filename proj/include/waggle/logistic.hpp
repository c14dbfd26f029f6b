#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "waggle/training.hpp"

namespace waggle {

/// Multinomial logistic regression: one weight row and bias per class,
/// softmax over the classes seen in training.
struct LogisticModel {
  static constexpr std::size_t kNumParams = kNumClasses * 3;

  std::array<std::array<double, 2>, kNumClasses> weights{};
  Scores bias{};
  ClassMask active{true, true, true};
  double l2_lambda = 0.0;

  Scores logits(const FeatureVector& v) const {
    Scores z{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      z[k] = weights[k][0] * v.x1 + weights[k][1] * v.x2 + bias[k];
    }
    return z;
  }

  Scores probabilities(const FeatureVector& v) const {
    return detail::masked_softmax(logits(v), active);
  }

  // Flat layout: w[k][0], w[k][1], b[k] for each class k.
  std::array<double, kNumParams> params() const {
    std::array<double, kNumParams> p{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      p[3 * k] = weights[k][0];
      p[3 * k + 1] = weights[k][1];
      p[3 * k + 2] = bias[k];
    }
    return p;
  }

  void set_params(const std::array<double, kNumParams>& p) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      weights[k] = {p[3 * k], p[3 * k + 1]};
      bias[k] = p[3 * k + 2];
    }
  }

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

/// Mean cross-entropy plus (lambda / 2) * ||W||^2; biases are not penalized.
inline std::pair<double, std::array<double, LogisticModel::kNumParams>> logistic_loss_and_gradient(
    const LogisticModel& model, const Dataset& data) {
  std::array<double, LogisticModel::kNumParams> grad{};
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const FeatureVector v{data.x[i][0], data.x[i][1]};
    const Scores p = model.probabilities(v);
    loss -= std::log(p[data.y[i]]) * inv_n;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (!model.active[k]) continue;
      const double r = (p[k] - (data.y[i] == k ? 1.0 : 0.0)) * inv_n;
      grad[3 * k] += r * v.x1;
      grad[3 * k + 1] += r * v.x2;
      grad[3 * k + 2] += r;
    }
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (!model.active[k]) continue;
    for (std::size_t j = 0; j < 2; ++j) {
      loss += 0.5 * model.l2_lambda * model.weights[k][j] * model.weights[k][j];
      grad[3 * k + j] += model.l2_lambda * model.weights[k][j];
    }
  }
  return {loss, grad};
}

/// Full-batch gradient descent with momentum from a zero start. The seed is
/// not used: the problem is convex and the start is fixed.
inline LogisticModel train_logistic(const FeatureTable& table, const TrainConfig& cfg,
                                    std::vector<double>* loss_history = nullptr) {
  cfg.validate();
  const Dataset data = Dataset::from_table(table);
  const LogisticParams& hp = cfg.logistic;

  LogisticModel model;
  model.active = data.present;
  model.l2_lambda = hp.l2_lambda;

  auto theta = model.params();
  std::array<double, LogisticModel::kNumParams> velocity{};
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    model.set_params(theta);
    const auto [loss, grad] = logistic_loss_and_gradient(model, data);
    if (loss_history) loss_history->push_back(loss);
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    if (std::sqrt(norm2) < hp.gradient_tolerance) break;
    for (std::size_t p = 0; p < theta.size(); ++p) {
      velocity[p] = hp.momentum * velocity[p] - hp.learning_rate * grad[p];
      theta[p] += velocity[p];
    }
  }
  model.set_params(theta);
  return model;
}

inline Prediction predict(const LogisticModel& model, const FeatureVector& v) {
  detail::check_input(v);
  const Scores p = model.probabilities(v);
  return Prediction{label_at(detail::argmax(p)), p, {}};
}

}  // namespace waggle
