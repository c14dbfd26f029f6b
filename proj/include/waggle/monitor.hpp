#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "waggle/error.hpp"
#include "waggle/signal.hpp"

namespace waggle {

struct MonitorConfig {
  std::size_t window = 3;
  double threshold = -0.7;
  std::size_t refractory = 15;       // minimum spacing between events, samples
  std::size_t lookback = 90;         // 3 s at 30 Hz
  std::size_t min_segment_len = 15;  // shorter segments are merged away
  // When set, a trigger window never reaches back past the previous event,
  // so it covers exactly the segment the trigger closes (capped at lookback).
  bool clip_lookback_to_event = true;

  std::size_t min_window_samples() const { return window + 2; }

  void validate() const {
    if (window == 0) throw Error(ErrorKind::InvalidWindow, "monitor window must be >= 1");
    if (!(threshold >= -1.0 && threshold <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "threshold must lie in [-1, 1]");
    }
    if (refractory == 0) throw Error(ErrorKind::InvalidConfig, "refractory must be >= 1");
    if (min_segment_len == 0) throw Error(ErrorKind::InvalidConfig, "min_segment_len must be >= 1");
    if (lookback < min_window_samples()) {
      throw Error(ErrorKind::InvalidConfig, "lookback must be >= window + 2");
    }
  }
};

enum class Direction { Downward, Upward };

struct CrossingEvent {
  std::size_t index = 0;  // input-coordinate sample index
  Direction direction = Direction::Downward;

  friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

namespace detail {

// Threshold state machine: Downward when m drops strictly below the
// threshold, Upward when it is back at or above it. After any event the
// detector stays disarmed for `refractory` samples.
class CrossingDetector {
 public:
  CrossingDetector(double threshold, std::size_t refractory)
      : threshold_(threshold), refractory_(refractory) {}

  std::optional<CrossingEvent> update(std::size_t index, double m) {
    if (last_event_ && index < *last_event_ + refractory_) return std::nullopt;
    std::optional<CrossingEvent> event;
    if (!below_ && m < threshold_) {
      event = CrossingEvent{index, Direction::Downward};
    } else if (below_ && m >= threshold_) {
      event = CrossingEvent{index, Direction::Upward};
    }
    if (event) {
      below_ = !below_;
      last_event_ = index;
    }
    return event;
  }

  std::optional<std::size_t> last_event() const { return last_event_; }
  bool armed(std::size_t next_index) const {
    return !last_event_ || next_index >= *last_event_ + refractory_;
  }

 private:
  double threshold_;
  std::size_t refractory_;
  bool below_ = false;
  std::optional<std::size_t> last_event_;
};

}  // namespace detail

/// m_t = trailing moving average of sin(theta). Element j belongs to input
/// index j + window - 1.
inline std::vector<double> monitoring_series(const Trajectory& trajectory,
                                             const MonitorConfig& config) {
  const TrigSeries trig = trig_lift(trajectory);
  return moving_average(trig.sin, config.window);
}

inline std::vector<CrossingEvent> detect_events(std::span<const double> monitor,
                                                const MonitorConfig& config) {
  detail::CrossingDetector detector(config.threshold, config.refractory);
  std::vector<CrossingEvent> events;
  for (std::size_t j = 0; j < monitor.size(); ++j) {
    if (auto e = detector.update(j + config.window - 1, monitor[j])) events.push_back(*e);
  }
  return events;
}

/// Cuts [0, length) at every event index and merges segments shorter than
/// `min_len` into their predecessor (a short leading run merges forward).
inline std::vector<Segment> segments_from_events(std::size_t length,
                                                 std::span<const CrossingEvent> events,
                                                 std::size_t min_len) {
  std::vector<Segment> out;
  std::size_t start = 0;
  auto close = [&](std::size_t boundary) {
    if (boundary <= start) return;
    if (boundary - start < min_len) {
      if (!out.empty()) {
        out.back().end = boundary;
        start = boundary;
      }
      return;  // leading short run: keep start, extend forward
    }
    out.push_back(Segment{start, boundary, std::nullopt});
    start = boundary;
  };
  for (const CrossingEvent& e : events) {
    if (e.index < length) close(e.index);
  }
  close(length);
  if (out.empty() && length > 0) out.push_back(Segment{0, length, std::nullopt});
  return out;
}

inline std::vector<Segment> segment_trajectory(const Trajectory& trajectory,
                                               const MonitorConfig& config) {
  config.validate();
  const auto m = monitoring_series(trajectory, config);
  const auto events = detect_events(m, config);
  auto segments = segments_from_events(trajectory.size(), events, config.min_segment_len);
  for (Segment& s : segments) s.label = majority_label(trajectory, s.start, s.end);
  return segments;
}

/// Samples handed to the classifier when the monitor fires. Covers the
/// half-open index range [start, end) where end is the trigger index.
struct TriggerWindow {
  CrossingEvent event;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<Sample> samples;

  std::vector<double> thetas() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(s.theta);
    return out;
  }
};

namespace detail {

// [start, trigger) for a trigger at `trigger`, given the earliest available
// index and the previous event, if any.
inline std::pair<std::size_t, std::size_t> trigger_bounds(std::size_t trigger,
                                                          std::size_t first_index,
                                                          std::optional<std::size_t> previous,
                                                          const MonitorConfig& config) {
  const std::size_t floor = std::max(first_index, trigger > config.lookback ? trigger - config.lookback : 0);
  std::size_t start = floor;
  if (config.clip_lookback_to_event && previous) start = std::max(start, *previous);
  const std::size_t min_len = config.min_window_samples();
  if (trigger - start < min_len) start = std::max(floor, trigger >= min_len ? trigger - min_len : 0);
  return {start, trigger};
}

}  // namespace detail

/// Offline counterpart of the streaming circuit: the window each event would
/// hand to the classifier.
inline std::vector<TriggerWindow> trigger_windows(const Trajectory& trajectory,
                                                  const MonitorConfig& config) {
  config.validate();
  const auto events = detect_events(monitoring_series(trajectory, config), config);
  std::vector<TriggerWindow> out;
  out.reserve(events.size());
  std::optional<std::size_t> previous;
  const auto samples = trajectory.samples();
  for (const CrossingEvent& e : events) {
    auto [start, end] = detail::trigger_bounds(e.index, 0, previous, config);
    out.push_back(TriggerWindow{e, start, end,
                                std::vector<Sample>(samples.begin() + static_cast<std::ptrdiff_t>(start),
                                                    samples.begin() + static_cast<std::ptrdiff_t>(end))});
    previous = e.index;
  }
  return out;
}

/// Streaming monitor state for one bee. Single owner; push samples in index
/// order with step().
class StreamMonitor {
 public:
  explicit StreamMonitor(MonitorConfig config = {})
      : config_((config.validate(), config)),
        accumulator_(config_.window),
        detector_(config_.threshold, config_.refractory),
        ring_(config_.lookback + 1) {}

  const MonitorConfig& config() const { return config_; }

  /// Pushes one sample. Returns the trigger window when the sample completes
  /// a threshold crossing.
  std::optional<TriggerWindow> step(Sample sample) {
    if (started_ && sample.index != next_index_) {
      throw Error(ErrorKind::OutOfOrder, "expected consecutive sample indices",
                  static_cast<std::size_t>(sample.index));
    }
    if (!std::isfinite(sample.theta)) {
      throw Error(ErrorKind::InvalidAngle, "non-finite theta", static_cast<std::size_t>(sample.index));
    }
    sample.theta = normalize_angle(sample.theta);
    if (!started_) {
      started_ = true;
      first_index_ = static_cast<std::size_t>(sample.index);
    }
    next_index_ = sample.index + 1;
    const auto index = static_cast<std::size_t>(sample.index);

    ring_[count_ % ring_.size()] = sample;
    ++count_;

    const auto m = accumulator_.push(std::sin(sample.theta));
    if (!m) return std::nullopt;
    last_m_ = *m;
    const auto previous = detector_.last_event();
    const auto event = detector_.update(index, *m);
    if (!event) return std::nullopt;

    auto [start, end] = detail::trigger_bounds(index, first_index_, previous, config_);
    TriggerWindow out{*event, start, end, {}};
    out.samples.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) {
      out.samples.push_back(ring_[(i - first_index_) % ring_.size()]);
    }
    return out;
  }

  std::optional<double> last_monitor_value() const { return last_m_; }
  bool armed() const { return detector_.armed(static_cast<std::size_t>(next_index_)); }
  std::optional<std::size_t> last_event_index() const { return detector_.last_event(); }
  double running_sum() const { return accumulator_.running_sum(); }
  double exact_window_sum() const { return accumulator_.exact_sum(); }

 private:
  MonitorConfig config_;
  detail::WindowAccumulator accumulator_;
  detail::CrossingDetector detector_;
  std::vector<Sample> ring_;  // trigger sample plus the `lookback` before it
  std::size_t count_ = 0;
  std::size_t first_index_ = 0;
  std::uint64_t next_index_ = 0;
  bool started_ = false;
  std::optional<double> last_m_;
};

}  // namespace waggle
