#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "waggle/error.hpp"
#include "waggle/features.hpp"
#include "waggle/signal.hpp"

namespace waggle {

using ClassMask = std::array<bool, kNumClasses>;
using Scores = std::array<double, kNumClasses>;

struct LogisticParams {
  double learning_rate = 0.1;
  double momentum = 0.9;
  std::size_t epochs = 10000;
  double l2_lambda = 1e-8;
  double gradient_tolerance = 1e-6;
};

struct MlpParams {
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t epochs = 500;
};

struct SvmParams {
  double C = 1.0;
  double gamma = 0.5;
  double tolerance = 1e-3;
  std::size_t max_passes = 10;
  std::size_t max_iterations = 10000;  // full sweeps before ConvergenceFailure
};

struct TrainConfig {
  std::uint64_t seed = 1;
  LogisticParams logistic;
  MlpParams mlp;
  SvmParams svm;

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    auto fraction = [](double v) { return v >= 0.0 && v < 1.0; };
    if (!positive(logistic.learning_rate) || !fraction(logistic.momentum) ||
        !(logistic.l2_lambda >= 0.0) || !(logistic.gradient_tolerance >= 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "invalid logistic regression parameters");
    }
    if (!positive(mlp.learning_rate) || !fraction(mlp.momentum)) {
      throw Error(ErrorKind::InvalidConfig, "invalid MLP parameters");
    }
    if (!positive(svm.C) || !positive(svm.gamma) || !positive(svm.tolerance) ||
        svm.max_passes == 0 || svm.max_iterations == 0) {
      throw Error(ErrorKind::InvalidConfig, "invalid SVM parameters");
    }
  }
};

/// Dense training view of a labeled feature table.
struct Dataset {
  std::vector<std::array<double, 2>> x;
  std::vector<std::size_t> y;  // class index, see class_index()
  ClassMask present{false, false, false};

  std::size_t size() const { return x.size(); }

  std::size_t num_present() const {
    return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
  }

  static Dataset from_table(const FeatureTable& table) {
    Dataset d;
    d.x.reserve(table.size());
    d.y.reserve(table.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const FeatureRow& r = table.rows[i];
      if (!r.features.finite()) throw Error(ErrorKind::InvalidInput, "non-finite feature", i);
      if (!r.label) throw Error(ErrorKind::InvalidInput, "unlabeled training row", i);
      d.x.push_back(r.features.as_array());
      d.y.push_back(class_index(*r.label));
      d.present[d.y.back()] = true;
    }
    if (d.num_present() < 2) {
      throw Error(ErrorKind::DegenerateLabels, "training needs at least two classes");
    }
    return d;
  }
};

namespace detail {

// Softmax over the active classes; inactive entries get probability 0.
inline Scores masked_softmax(const Scores& logits, const ClassMask& active) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (active[k]) top = std::max(top, logits[k]);
  }
  Scores p{0.0, 0.0, 0.0};
  double total = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (!active[k]) continue;
    p[k] = std::exp(logits[k] - top);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

// First index of the maximum, i.e. ties go to the lowest class code.
inline std::size_t argmax(const Scores& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (s[k] > s[best]) best = k;
  }
  return best;
}

inline void check_input(const FeatureVector& v) {
  if (!v.finite()) throw Error(ErrorKind::InvalidInput, "non-finite feature vector");
}

}  // namespace detail

struct Prediction {
  MoveLabel label = MoveLabel::TurnRight;
  Scores scores{};   // probabilities, or one-vs-one vote counts for the SVM
  Scores margins{};  // SVM only: summed pairwise decision values

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

}  // namespace waggle
