#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "waggle/error.hpp"
#include "waggle/signal.hpp"

namespace waggle {

/// The two discriminant features of an interval of head angles:
///   x1 = mean of the first difference of MovAve(cos theta, 3)
///   x2 = max of MovAve(cos theta, 3)
struct FeatureVector {
  double x1 = 0.0;
  double x2 = 0.0;

  std::array<double, 2> as_array() const { return {x1, x2}; }
  double operator[](std::size_t i) const { return i == 0 ? x1 : x2; }
  bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::size_t kFeatureWindow = 3;

inline FeatureVector extract_features(std::span<const double> thetas,
                                      std::size_t window = kFeatureWindow) {
  if (window == 0) throw Error(ErrorKind::InvalidWindow, "feature window must be >= 1");
  if (thetas.size() < window + 2) {
    throw Error(ErrorKind::TooShort, "feature extraction needs at least window + 2 samples");
  }
  const TrigSeries trig = trig_lift(thetas);
  const auto averaged = moving_average(trig.cos, window);
  const auto steps = first_difference(averaged);
  double total = 0.0;
  for (double d : steps) total += d;
  return FeatureVector{total / static_cast<double>(steps.size()),
                       *std::max_element(averaged.begin(), averaged.end())};
}

struct SourceId {
  std::string bee_id;
  std::size_t segment_idx = 0;

  friend bool operator==(const SourceId&, const SourceId&) = default;
};

struct FeatureRow {
  FeatureVector features;
  std::optional<MoveLabel> label;
  SourceId source;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  // Throws when any row is unlabeled or non-finite.
  std::vector<MoveLabel> labels() const {
    std::vector<MoveLabel> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].label) throw Error(ErrorKind::InvalidInput, "unlabeled feature row", i);
      out.push_back(*rows[i].label);
    }
    return out;
  }

  FeatureTable subset(std::span<const std::size_t> indices) const {
    FeatureTable out;
    out.rows.reserve(indices.size());
    for (std::size_t i : indices) out.rows.push_back(rows.at(i));
    return out;
  }
};

/// One row per segment, in segment order. Rows take the majority per-sample
/// label when the trajectory is labeled.
inline FeatureTable build_feature_table(const Trajectory& trajectory,
                                        std::span<const Segment> segments,
                                        const std::string& bee_id = "",
                                        std::size_t window = kFeatureWindow) {
  FeatureTable table;
  table.rows.reserve(segments.size());
  const auto thetas = trajectory.thetas();
  std::size_t expected_start = 0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& seg = segments[k];
    if (seg.start != expected_start || seg.end <= seg.start || seg.end > trajectory.size()) {
      throw Error(ErrorKind::InvalidInput, "segments must tile the trajectory", k);
    }
    expected_start = seg.end;
    if (seg.length() < window + 2) {
      throw Error(ErrorKind::TooShort, "segment too short for feature extraction", k);
    }
    const auto span = std::span<const double>(thetas).subspan(seg.start, seg.length());
    table.rows.push_back(FeatureRow{extract_features(span, window),
                                    majority_label(trajectory, seg.start, seg.end),
                                    SourceId{bee_id, k}});
  }
  if (expected_start != trajectory.size()) {
    throw Error(ErrorKind::InvalidInput, "segments must tile the trajectory", segments.size());
  }
  return table;
}

/// Per-feature affine standardization fitted on training rows.
class Standardizer {
 public:
  static constexpr double kMinStd = 1e-9;

  Standardizer() = default;
  Standardizer(std::array<double, 2> mean, std::array<double, 2> stddev)
      : mean_(mean), std_(stddev) {
    for (double& s : std_) s = std::max(s, kMinStd);
  }

  /// Sample mean and (n - 1) standard deviation of each column.
  static Standardizer fit(const FeatureTable& table) {
    const std::size_t n = table.size();
    if (n < 2) throw Error(ErrorKind::TooFewRows, "standardizer needs at least 2 rows");
    std::array<double, 2> mean{0.0, 0.0};
    for (const FeatureRow& r : table.rows) {
      if (!r.features.finite()) throw Error(ErrorKind::InvalidInput, "non-finite feature");
      mean[0] += r.features.x1;
      mean[1] += r.features.x2;
    }
    mean[0] /= static_cast<double>(n);
    mean[1] /= static_cast<double>(n);
    std::array<double, 2> var{0.0, 0.0};
    for (const FeatureRow& r : table.rows) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double d = r.features[j] - mean[j];
        var[j] += d * d;
      }
    }
    return Standardizer(mean, {std::sqrt(var[0] / static_cast<double>(n - 1)),
                               std::sqrt(var[1] / static_cast<double>(n - 1))});
  }

  FeatureVector apply(const FeatureVector& v) const {
    return {(v.x1 - mean_[0]) / std_[0], (v.x2 - mean_[1]) / std_[1]};
  }

  FeatureVector invert(const FeatureVector& v) const {
    return {v.x1 * std_[0] + mean_[0], v.x2 * std_[1] + mean_[1]};
  }

  FeatureTable apply(const FeatureTable& table) const {
    FeatureTable out = table;
    for (FeatureRow& r : out.rows) r.features = apply(r.features);
    return out;
  }

  const std::array<double, 2>& mean() const { return mean_; }
  const std::array<double, 2>& stddev() const { return std_; }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  std::array<double, 2> mean_{0.0, 0.0};
  std::array<double, 2> std_{1.0, 1.0};
};

}  // namespace waggle
