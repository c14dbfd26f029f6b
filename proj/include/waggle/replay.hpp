#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "waggle/classifier.hpp"
#include "waggle/features.hpp"
#include "waggle/monitor.hpp"
#include "waggle/signal.hpp"

namespace waggle {

// One classifier decision of the real-time circuit.
struct CircuitEvent {
  CrossingEvent event;
  std::size_t window_start = 0;
  std::optional<FeatureVector> features;  // empty when the window is too short
  std::optional<Prediction> prediction;
  double latency_us = 0.0;  // feature extraction + prediction
};

struct ReplayOptions {
  bool max_speed = true;
  double target_rate_hz = 30.0;
};

struct ReplayLog {
  std::vector<CircuitEvent> events;
  std::size_t samples = 0;
  double elapsed_s = 0.0;
  double samples_per_second = 0.0;
};

namespace detail {

inline CircuitEvent classify_window(const TriggerWindow& window, const MonitorConfig& config,
                                    const ClassifierModel& model) {
  const auto t0 = std::chrono::steady_clock::now();
  CircuitEvent out{window.event, window.start, std::nullopt, std::nullopt, 0.0};
  if (window.samples.size() >= config.min_window_samples()) {
    const auto thetas = window.thetas();
    out.features = extract_features(thetas);
    out.prediction = predict(model, *out.features);
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
  return out;
}

}  // namespace detail

/// Drives the monitor -> features -> classifier circuit over a recorded
/// trajectory, either paced at the target rate or as fast as possible.
inline ReplayLog replay_stream(const Trajectory& trajectory, const MonitorConfig& config,
                               const ClassifierModel& model, const ReplayOptions& options = {}) {
  StreamMonitor monitor(config);
  ReplayLog log;
  const auto start = std::chrono::steady_clock::now();
  const auto period = std::chrono::duration<double>(1.0 / options.target_rate_hz);
  std::size_t n = 0;
  for (const Sample& s : trajectory.samples()) {
    if (!options.max_speed) {
      std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                period * static_cast<double>(n)));
    }
    if (auto window = monitor.step(s)) log.events.push_back(detail::classify_window(*window, config, model));
    ++n;
  }
  log.samples = n;
  log.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log.samples_per_second = log.elapsed_s > 0.0 ? static_cast<double>(n) / log.elapsed_s : 0.0;
  return log;
}

/// Same decisions computed offline from the whole trajectory.
inline std::vector<CircuitEvent> classify_offline(const Trajectory& trajectory, const MonitorConfig& config,
                                                  const ClassifierModel& model) {
  std::vector<CircuitEvent> out;
  for (const TriggerWindow& w : trigger_windows(trajectory, config)) {
    out.push_back(detail::classify_window(w, config, model));
  }
  return out;
}

inline constexpr std::string_view kEventLogHeader =
    "trigger_index,direction,window_start,label,score_turn_right,score_turn_left,score_waggle,latency_us";

inline void write_event_log(std::ostream& out, std::span<const CircuitEvent> events) {
  out << kEventLogHeader << '\n';
  for (const CircuitEvent& e : events) {
    out << e.event.index << ',' << (e.event.direction == Direction::Downward ? "down" : "up") << ','
        << e.window_start << ',';
    if (e.prediction) {
      out << label_code(e.prediction->label);
      for (double s : e.prediction->scores) out << ',' << detail::format_number(s);
    } else {
      out << ",,,";
    }
    out << ',' << static_cast<long long>(e.latency_us + 0.5) << '\n';
  }
}

}  // namespace waggle
