#pragma once

// Shared generators and brute-force oracles for the test binaries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "waggle/waggle.hpp"

namespace testing_support {

using waggle::FeatureRow;
using waggle::FeatureTable;
using waggle::MoveLabel;

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return out;
}

inline std::vector<double> random_angles(std::mt19937_64& rng, std::size_t n) {
  return random_series(rng, n, -std::numbers::pi, std::numbers::pi);
}

// Naive trailing mean: each output summed from scratch.
inline std::vector<double> naive_moving_average(const std::vector<double>& s, std::size_t w) {
  std::vector<double> out;
  for (std::size_t i = w - 1; i < s.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - w; j <= i; ++j) sum += s[j];
    out.push_back(sum / static_cast<double>(w));
  }
  return out;
}

inline std::vector<double> naive_difference(const std::vector<double>& s) {
  std::vector<double> out;
  for (std::size_t i = 1; i < s.size(); ++i) out.push_back(s[i] - s[i - 1]);
  return out;
}

inline waggle::Trajectory trajectory_from_thetas(const std::vector<double>& thetas,
                                                 std::optional<MoveLabel> label = std::nullopt) {
  std::vector<waggle::Sample> samples;
  samples.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) samples.push_back({i, 0.0, 0.0, thetas[i], label});
  return waggle::Trajectory(std::move(samples));
}

inline FeatureRow row(double x1, double x2, MoveLabel label, std::size_t idx = 0) {
  return FeatureRow{{x1, x2}, label, {"t", idx}};
}

// Gaussian blobs, one per (centre, label) pair.
struct Blob {
  double x1;
  double x2;
  MoveLabel label;
};

inline FeatureTable blobs(const std::vector<Blob>& centres, std::size_t per_blob, double spread,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  FeatureTable t;
  for (const Blob& b : centres) {
    for (std::size_t i = 0; i < per_blob; ++i) t.rows.push_back(row(b.x1 + n(rng), b.x2 + n(rng), b.label, t.size()));
  }
  return t;
}

// Inner ring labeled `inner`, outer ring `outer`.
inline FeatureTable rings(std::size_t per_ring, std::uint64_t seed, MoveLabel inner = MoveLabel::Waggle,
                          MoveLabel outer = MoveLabel::TurnLeft) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  FeatureTable t;
  for (std::size_t i = 0; i < per_ring; ++i) {
    const double a = angle(rng), r = 0.5 + jitter(rng);
    t.rows.push_back(row(r * std::cos(a), r * std::sin(a), inner, t.size()));
  }
  for (std::size_t i = 0; i < per_ring; ++i) {
    const double a = angle(rng), r = 2.0 + jitter(rng);
    t.rows.push_back(row(r * std::cos(a), r * std::sin(a), outer, t.size()));
  }
  return t;
}

inline double training_accuracy(const waggle::ClassifierModel& model, const FeatureTable& t) {
  std::size_t ok = 0;
  for (const FeatureRow& r : t.rows) ok += waggle::predict(model, r.features).label == *r.label;
  return static_cast<double>(ok) / static_cast<double>(t.size());
}

// Feature table built from the generator's ground-truth segments.
inline FeatureTable truth_table(const std::vector<waggle::LabeledDance>& corpus) {
  std::vector<FeatureTable> tables;
  for (const auto& d : corpus) tables.push_back(waggle::build_feature_table(d.trajectory, d.truth, d.id));
  return waggle::pool_tables(tables);
}

// Feature table built from monitor segmentation.
inline FeatureTable segmented_table(const std::vector<waggle::LabeledDance>& corpus,
                                    const waggle::MonitorConfig& config = {}) {
  std::vector<FeatureTable> tables;
  for (const auto& d : corpus) {
    const auto segments = waggle::segment_trajectory(d.trajectory, config);
    tables.push_back(waggle::build_feature_table(d.trajectory, segments, d.id));
  }
  return waggle::pool_tables(tables);
}

}  // namespace testing_support
