#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "waggle/error.hpp"

namespace waggle {

// Dance-move classes with the dataset's numeric coding.
enum class MoveLabel : int { TurnRight = -1, TurnLeft = 0, Waggle = 1 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr MoveLabel kAllLabels[kNumClasses] = {
    MoveLabel::TurnRight, MoveLabel::TurnLeft, MoveLabel::Waggle};

constexpr int label_code(MoveLabel label) { return static_cast<int>(label); }

constexpr std::optional<MoveLabel> label_from_code(int code) {
  switch (code) {
    case -1: return MoveLabel::TurnRight;
    case 0: return MoveLabel::TurnLeft;
    case 1: return MoveLabel::Waggle;
    default: return std::nullopt;
  }
}

// Position of a label in score vectors: ascending class code.
constexpr std::size_t class_index(MoveLabel label) {
  return static_cast<std::size_t>(label_code(label) + 1);
}

constexpr MoveLabel label_at(std::size_t index) { return kAllLabels[index]; }

constexpr const char* label_name(MoveLabel label) {
  switch (label) {
    case MoveLabel::TurnRight: return "turn-right";
    case MoveLabel::TurnLeft: return "turn-left";
    case MoveLabel::Waggle: return "waggle";
  }
  return "?";
}

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(radians, two_pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

struct Sample {
  std::uint64_t index = 0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, (-pi, pi]
  std::optional<MoveLabel> label;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Half-open interval [start, end) of sample indices.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<MoveLabel> label;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// An ordered, gap-free run of samples. Construction validates and
/// normalizes; afterwards the value is immutable.
class Trajectory {
 public:
  static constexpr double kDefaultRateHz = 30.0;

  Trajectory() = default;

  explicit Trajectory(std::vector<Sample> samples, double rate_hz = kDefaultRateHz)
      : samples_(std::move(samples)), rate_hz_(rate_hz) {
    if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) {
      throw Error(ErrorKind::InvalidInput, "sample rate must be positive");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      Sample& s = samples_[i];
      if (!std::isfinite(s.theta)) {
        throw Error(ErrorKind::InvalidAngle, "non-finite theta", i);
      }
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
        throw Error(ErrorKind::InvalidInput, "non-finite body coordinate", i);
      }
      if (i > 0 && s.index != samples_[i - 1].index + 1) {
        throw Error(ErrorKind::GapError, "sample indices must increase by exactly 1", i);
      }
      s.theta = normalize_angle(s.theta);
    }
  }

  std::span<const Sample> samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double rate_hz() const { return rate_hz_; }

  std::vector<double> thetas() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const Sample& s : samples_) out.push_back(s.theta);
    return out;
  }

  bool has_labels() const {
    for (const Sample& s : samples_) {
      if (s.label) return true;
    }
    return false;
  }

 private:
  std::vector<Sample> samples_;
  double rate_hz_ = kDefaultRateHz;
};

/// Most frequent ground-truth label; ties resolve toward Waggle, then
/// TurnLeft. Unlabeled samples do not vote.
inline std::optional<MoveLabel> majority_label(std::span<const Sample> samples) {
  std::size_t votes[kNumClasses] = {0, 0, 0};
  for (const Sample& s : samples) {
    if (s.label) ++votes[class_index(*s.label)];
  }
  std::optional<MoveLabel> best;
  std::size_t best_votes = 0;
  for (std::size_t k = kNumClasses; k-- > 0;) {  // Waggle first
    if (votes[k] > best_votes) {
      best_votes = votes[k];
      best = label_at(k);
    }
  }
  return best;
}

inline std::optional<MoveLabel> majority_label(const Trajectory& trajectory, std::size_t start,
                                               std::size_t end) {
  return majority_label(trajectory.samples().subspan(start, end - start));
}

namespace detail {

// Trailing-window mean accumulator shared by the batch transform and the
// streaming monitor, so both produce bit-identical values. Small windows are
// summed directly; larger ones keep a running sum that is recomputed exactly
// every kResyncPeriod outputs.
class WindowAccumulator {
 public:
  static constexpr std::size_t kResyncPeriod = 64;
  static constexpr std::size_t kDirectSumMaxWindow = 4;

  explicit WindowAccumulator(std::size_t window) : ring_(window, 0.0) {}

  std::size_t window() const { return ring_.size(); }

  // Returns the mean once `window` values have been pushed.
  std::optional<double> push(double value) {
    const std::size_t w = ring_.size();
    const std::size_t slot = pushed_ % w;
    const double evicted = ring_[slot];
    ring_[slot] = value;
    ++pushed_;
    if (pushed_ < w) {
      sum_ += value;
      return std::nullopt;
    }
    const std::size_t ordinal = pushed_ - w;
    if (pushed_ == w) {
      sum_ += value;
    } else if (w <= kDirectSumMaxWindow || ordinal % kResyncPeriod == 0) {
      sum_ = exact_sum();
    } else {
      sum_ += value;
      sum_ -= evicted;
    }
    return sum_ / static_cast<double>(w);
  }

  // Sum of the current contents, oldest first.
  double exact_sum() const {
    const std::size_t w = ring_.size();
    const std::size_t n = pushed_ < w ? pushed_ : w;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += ring_[(pushed_ - n + k) % w];
    }
    return s;
  }

  double running_sum() const { return sum_; }

 private:
  std::vector<double> ring_;
  std::size_t pushed_ = 0;
  double sum_ = 0.0;
};

}  // namespace detail

/// Trailing moving average. Output element i covers input [i, i + window),
/// so it belongs to input index i + window - 1.
inline std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw Error(ErrorKind::InvalidWindow, "window must be >= 1");
  if (series.size() < window) {
    throw Error(ErrorKind::EmptyWindow, "series shorter than the averaging window");
  }
  detail::WindowAccumulator acc(window);
  std::vector<double> out;
  out.reserve(series.size() - window + 1);
  for (double v : series) {
    if (auto mean = acc.push(v)) out.push_back(*mean);
  }
  return out;
}

inline std::vector<double> first_difference(std::span<const double> series) {
  if (series.size() < 2) throw Error(ErrorKind::TooShort, "first difference needs >= 2 values");
  std::vector<double> out(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) out[i] = series[i + 1] - series[i];
  return out;
}

struct TrigSeries {
  std::vector<double> sin;
  std::vector<double> cos;
};

inline TrigSeries trig_lift(std::span<const double> thetas) {
  if (thetas.empty()) throw Error(ErrorKind::TooShort, "empty angle series");
  TrigSeries out;
  out.sin.reserve(thetas.size());
  out.cos.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!std::isfinite(thetas[i])) throw Error(ErrorKind::InvalidAngle, "non-finite theta", i);
    out.sin.push_back(std::sin(thetas[i]));
    out.cos.push_back(std::cos(thetas[i]));
  }
  return out;
}

inline TrigSeries trig_lift(const Trajectory& trajectory) {
  const auto thetas = trajectory.thetas();
  return trig_lift(std::span<const double>(thetas));
}

}  // namespace waggle
