#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "waggle/training.hpp"

namespace waggle {

inline double rbf_kernel(const std::array<double, 2>& a, const std::array<double, 2>& b, double gamma) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return std::exp(-gamma * (dx * dx + dy * dy));
}

/// One binary machine of the one-vs-one ensemble. A positive decision value
/// votes for `positive`.
struct BinarySvm {
  std::size_t positive = 0;  // class index
  std::size_t negative = 0;
  std::vector<std::array<double, 2>> support;
  std::vector<double> coef;  // alpha_i * y_i
  double bias = 0.0;

  double decision(const std::array<double, 2>& x, double gamma) const {
    double f = bias;
    for (std::size_t i = 0; i < support.size(); ++i) f += coef[i] * rbf_kernel(support[i], x, gamma);
    return f;
  }

  friend bool operator==(const BinarySvm&, const BinarySvm&) = default;
};

struct SvmRbfModel {
  double gamma = 0.5;
  double C = 1.0;
  ClassMask active{true, true, true};
  std::vector<BinarySvm> machines;

  friend bool operator==(const SvmRbfModel&, const SvmRbfModel&) = default;
};

// Index of the class pair (a, b), a < b: (0,1) -> 0, (0,2) -> 1, (1,2) -> 2.
constexpr std::size_t pair_id(std::size_t a, std::size_t b) { return a + b - 1; }

struct SmoSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t sweeps = 0;
};

// Called after every accepted pair update with the current multipliers.
using SmoObserver = std::function<void(std::span<const double> alpha)>;

/// Soft-margin dual by sequential minimal optimization. A sweep visits every
/// KKT violator (beyond `tolerance`) and pairs it first with the point of
/// largest |E_i - E_j|, then with every other point starting at a seeded
/// random offset. Stops after `max_passes` consecutive sweeps without an
/// update. Labels must be +1 / -1.
inline SmoSolution solve_smo(std::span<const std::array<double, 2>> x, std::span<const double> y,
                             const SvmParams& params, std::uint64_t seed,
                             const SmoObserver& observer = {}, std::size_t id = 0) {
  const std::size_t n = x.size();
  const double C = params.C;
  const double tol = params.tolerance;
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      K[i * n + j] = K[j * n + i] = rbf_kernel(x[i], x[j], params.gamma);
    }
  }

  SmoSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double>& alpha = sol.alpha;
  double& b = sol.bias;
  std::vector<double> E(n);  // f(x_i) - y_i
  for (std::size_t i = 0; i < n; ++i) E[i] = -y[i];
  std::mt19937_64 rng(seed);

  auto violates = [&](std::size_t i) {
    const double r = y[i] * E[i];
    return (r < -tol && alpha[i] < C) || (r > tol && alpha[i] > 0.0);
  };

  auto take_step = [&](std::size_t i, std::size_t j) {
    if (i == j) return false;
    const double ai = alpha[i];
    const double aj = alpha[j];
    double lo, hi;
    if (y[i] != y[j]) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(C, C + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - C);
      hi = std::min(C, ai + aj);
    }
    if (hi - lo < 1e-12) return false;
    const double kii = K[i * n + i], kjj = K[j * n + j], kij = K[i * n + j];
    const double eta = 2.0 * kij - kii - kjj;
    if (eta >= 0.0) return false;
    double aj_new = std::clamp(aj - y[j] * (E[i] - E[j]) / eta, lo, hi);
    if (std::abs(aj_new - aj) < 1e-10 * (aj_new + aj + 1e-10)) return false;
    double ai_new = std::clamp(ai + y[i] * y[j] * (aj - aj_new), 0.0, C);
    // Rounding can leave a multiplier one ulp off a bound, where it would
    // wrongly count as free.
    auto snap = [&](double a) { return a < 1e-12 * C ? 0.0 : a > C * (1.0 - 1e-12) ? C : a; };
    aj_new = snap(aj_new);
    ai_new = snap(ai_new);

    const double dai = ai_new - ai;
    const double daj = aj_new - aj;
    const double b1 = b - E[i] - y[i] * dai * kii - y[j] * daj * kij;
    const double b2 = b - E[j] - y[i] * dai * kij - y[j] * daj * kjj;
    double b_new;
    if (ai_new > 0.0 && ai_new < C) {
      b_new = b1;
    } else if (aj_new > 0.0 && aj_new < C) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - b;
    for (std::size_t k = 0; k < n; ++k) {
      E[k] += y[i] * dai * K[i * n + k] + y[j] * daj * K[j * n + k] + db;
    }
    alpha[i] = ai_new;
    alpha[j] = aj_new;
    b = b_new;
    if (observer) observer(alpha);
    return true;
  };

  std::size_t quiet = 0;
  while (quiet < params.max_passes) {
    if (++sol.sweeps > params.max_iterations) {
      throw Error(ErrorKind::ConvergenceFailure, "SMO exceeded its sweep limit", id);
    }
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!violates(i)) continue;
      std::size_t best = i;
      double gap = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double g = std::abs(E[i] - E[j]);
        if (j != i && g > gap) {
          gap = g;
          best = j;
        }
      }
      if (take_step(i, best)) {
        ++changed;
        continue;
      }
      const std::size_t offset = static_cast<std::size_t>(rng() % n);
      for (std::size_t t = 0; t < n; ++t) {
        if (take_step(i, (offset + t) % n)) {
          ++changed;
          break;
        }
      }
    }
    quiet = changed == 0 ? quiet + 1 : 0;
  }

  // Final threshold: average over free multipliers.
  double sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0 && alpha[i] < C) {
      sum += y[i] - (E[i] + y[i] - b);
      ++free_count;
    }
  }
  if (free_count > 0) b = sum / static_cast<double>(free_count);
  return sol;
}

/// One-vs-one RBF SVM over the class pairs present in the table. Features
/// are expected to be standardized by the caller.
inline SvmRbfModel train_svm_rbf(const FeatureTable& table, const TrainConfig& cfg,
                                 const SmoObserver& observer = {}) {
  cfg.validate();
  const Dataset data = Dataset::from_table(table);
  SvmRbfModel model;
  model.gamma = cfg.svm.gamma;
  model.C = cfg.svm.C;
  model.active = data.present;
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t c = a + 1; c < kNumClasses; ++c) {
      if (!data.present[a] || !data.present[c]) continue;
      std::vector<std::array<double, 2>> xs;
      std::vector<double> ys;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.y[i] == a || data.y[i] == c) {
          xs.push_back(data.x[i]);
          ys.push_back(data.y[i] == a ? 1.0 : -1.0);
        }
      }
      const std::size_t id = pair_id(a, c);
      const SmoSolution sol = solve_smo(xs, ys, cfg.svm, cfg.seed + 0x9E3779B97F4A7C15ULL * (id + 1),
                                        observer, id);
      BinarySvm machine;
      machine.positive = a;
      machine.negative = c;
      machine.bias = sol.bias;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (sol.alpha[i] > 0.0) {
          machine.support.push_back(xs[i]);
          machine.coef.push_back(sol.alpha[i] * ys[i]);
        }
      }
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

/// Majority vote over the pairwise machines; ties go to the larger summed
/// decision value, then to the lowest class code.
inline Prediction predict(const SvmRbfModel& model, const FeatureVector& v) {
  detail::check_input(v);
  Prediction out;
  const std::array<double, 2> x = v.as_array();
  for (const BinarySvm& m : model.machines) {
    const double f = m.decision(x, model.gamma);
    out.scores[f >= 0.0 ? m.positive : m.negative] += 1.0;
    out.margins[m.positive] += f;
    out.margins[m.negative] -= f;
  }
  std::size_t best = 0;
  bool found = false;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (!model.active[k]) continue;
    if (!found || out.scores[k] > out.scores[best] ||
        (out.scores[k] == out.scores[best] && out.margins[k] > out.margins[best])) {
      best = k;
      found = true;
    }
  }
  out.label = label_at(best);
  return out;
}

}  // namespace waggle
