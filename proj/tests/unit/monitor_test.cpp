#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <vector>

#include "support.hpp"
#include "waggle/monitor.hpp"

using namespace waggle;
namespace ts = testing_support;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Theta series whose sin is exactly `s` (|s| <= 1).
std::vector<double> thetas_for_sin(const std::vector<double>& s) {
  std::vector<double> out;
  for (double v : s) out.push_back(std::asin(v));
  return out;
}

std::vector<CrossingEvent> stream_events(const Trajectory& t, const MonitorConfig& config) {
  StreamMonitor monitor(config);
  std::vector<CrossingEvent> out;
  for (const Sample& s : t.samples()) {
    if (auto w = monitor.step(s)) out.push_back(w->event);
  }
  return out;
}

// Scan oracle written independently of CrossingDetector.
std::vector<CrossingEvent> scan_events(const std::vector<double>& m, std::size_t offset, double threshold,
                                       std::size_t refractory) {
  std::vector<CrossingEvent> out;
  bool below = false;
  long long last = -1'000'000;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const long long idx = static_cast<long long>(j + offset);
    if (idx - last < static_cast<long long>(refractory)) continue;
    const bool now_below = m[j] < threshold;
    if (now_below != below) {
      out.push_back({static_cast<std::size_t>(idx), now_below ? Direction::Downward : Direction::Upward});
      below = now_below;
      last = idx;
    }
  }
  return out;
}

}  // namespace

TEST(MonitoringSeries, Examples) {
  MonitorConfig c;
  EXPECT_EQ(monitoring_series(ts::trajectory_from_thetas(std::vector<double>(10, 0.0)), c),
            std::vector<double>(8, 0.0));
  for (double v : monitoring_series(ts::trajectory_from_thetas(std::vector<double>(10, -kHalfPi)), c)) {
    EXPECT_EQ(v, -1.0);
  }
  const auto m = monitoring_series(ts::trajectory_from_thetas({0, -kHalfPi, -kHalfPi, -kHalfPi}), c);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_NEAR(m[0], -2.0 / 3.0, 1e-15);
  EXPECT_EQ(m[1], -1.0);
}

TEST(DetectEvents, FlatSeriesNeverFires) {
  const std::vector<double> m(100, 0.0);
  EXPECT_TRUE(detect_events(m, MonitorConfig{}).empty());
}

TEST(DetectEvents, DipProducesDownThenUp) {
  MonitorConfig c;
  c.refractory = 1;
  const std::vector<double> m{0, 0, -0.8, -0.8, 0, 0};
  const std::vector<CrossingEvent> expected{{4, Direction::Downward}, {6, Direction::Upward}};
  EXPECT_EQ(detect_events(m, c), expected);
}

TEST(DetectEvents, RefractorySwallowsQuickRecovery) {
  MonitorConfig c;  // refractory 15
  std::vector<double> m(40, 0.0);
  m[5] = -0.8;   // dip
  m[9] = -0.8;   // second dip, 3 samples of recovery in between
  const auto events = detect_events(m, c);
  // The second dip lands inside the refractory span; the recovery is only
  // reported once the span has elapsed.
  const auto downs = std::count_if(events.begin(), events.end(),
                                   [](const CrossingEvent& e) { return e.direction == Direction::Downward; });
  EXPECT_EQ(downs, 1);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].index, events[0].index + c.refractory);
}

TEST(DetectEvents, ExactlyAtThresholdCountsAsAbove) {
  MonitorConfig c;
  c.refractory = 1;
  const std::vector<double> m{0, -0.7, -0.7000001, -0.7};
  const std::vector<CrossingEvent> expected{{4, Direction::Downward}, {5, Direction::Upward}};
  EXPECT_EQ(detect_events(m, c), expected);
}

TEST(DetectEvents, MatchesScanOracleAndAlternates) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10000; ++trial) {
    MonitorConfig c;
    c.refractory = 1 + rng() % 20;
    c.window = 1 + rng() % 5;
    const auto m = ts::random_series(rng, 20 + rng() % 80, -1.0, 1.0);
    const auto events = detect_events(m, c);
    ASSERT_EQ(events, scan_events(m, c.window - 1, c.threshold, c.refractory));
    for (std::size_t i = 0; i < events.size(); ++i) {
      ASSERT_EQ(events[i].direction, i % 2 == 0 ? Direction::Downward : Direction::Upward);
      if (i > 0) {
        ASSERT_GE(events[i].index - events[i - 1].index, c.refractory);
      }
      ASSERT_GE(events[i].index, c.window - 1);
    }
  }
}

TEST(SegmentsFromEvents, NoEventsGivesOneSegment) {
  EXPECT_EQ(segments_from_events(50, {}, 15), (std::vector<Segment>{{0, 50, {}}}));
}

TEST(SegmentsFromEvents, CutsAtEvents) {
  const std::vector<CrossingEvent> e{{40, Direction::Downward}, {100, Direction::Upward}, {130, Direction::Downward}};
  const std::vector<Segment> expected{{0, 40, {}}, {40, 100, {}}, {100, 130, {}}, {130, 200, {}}};
  EXPECT_EQ(segments_from_events(200, e, 15), expected);
}

TEST(SegmentsFromEvents, ShortRunsMergeBackwardAndLeadingForward) {
  const std::vector<CrossingEvent> e{{5, Direction::Downward}, {40, Direction::Upward}, {45, Direction::Downward}};
  const std::vector<Segment> expected{{0, 45, {}}, {45, 100, {}}};
  EXPECT_EQ(segments_from_events(100, e, 15), expected);
  // A short tail folds into its predecessor too.
  const std::vector<CrossingEvent> tail{{50, Direction::Downward}};
  EXPECT_EQ(segments_from_events(60, tail, 15), (std::vector<Segment>{{0, 60, {}}}));
}

TEST(SegmentTrajectory, TilesAndRespectsMinLength) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    MonitorConfig c;
    c.refractory = 1 + rng() % 10;
    c.min_segment_len = 1 + rng() % 20;
    const std::size_t n = 20 + rng() % 300;
    const auto t = ts::trajectory_from_thetas(ts::random_angles(rng, n));
    const auto segments = segment_trajectory(t, c);
    ASSERT_FALSE(segments.empty());
    std::size_t expect_start = 0;
    for (const Segment& s : segments) {
      ASSERT_EQ(s.start, expect_start);
      ASSERT_GT(s.end, s.start);
      if (segments.size() > 1) {
        ASSERT_GE(s.length(), c.min_segment_len);
      }
      expect_start = s.end;
    }
    ASSERT_EQ(expect_start, n);
  }
}

TEST(SegmentTrajectory, LabelsByMajority) {
  std::vector<double> th(60, 0.0);
  const auto t = ts::trajectory_from_thetas(th, MoveLabel::Waggle);
  const auto segments = segment_trajectory(t, MonitorConfig{});
  ASSERT_EQ(segments.size(), 1u);
  EXPECT_EQ(segments[0].label, MoveLabel::Waggle);
}

TEST(MonitorConfig, Validation) {
  MonitorConfig c;
  c.window = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.lookback = 4;
  try {
    c.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST(StreamMonitor, ConstantStreamNeverTriggers) {
  StreamMonitor m;
  for (std::uint64_t i = 0; i < 500; ++i) EXPECT_FALSE(m.step({i, 0, 0, 0.0, {}}));
}

TEST(StreamMonitor, MatchesBatchOnDip) {
  MonitorConfig c;
  c.refractory = 1;
  // sin(theta) = -1 on inputs 4..7, so m = -1/3, -2/3, -1, -1, -2/3 on 4..8.
  std::vector<double> s(12, 0.0);
  s[4] = s[5] = s[6] = s[7] = -1.0;
  const auto t = ts::trajectory_from_thetas(thetas_for_sin(s));
  const auto batch = detect_events(monitoring_series(t, c), c);
  const std::vector<CrossingEvent> expected{{6, Direction::Downward}, {8, Direction::Upward}};
  EXPECT_EQ(batch, expected);
  EXPECT_EQ(stream_events(t, c), batch);
}

TEST(StreamMonitor, LateTriggerCarriesFullLookback) {
  std::vector<double> th(1000, 0.0);
  th.insert(th.end(), 10, -kHalfPi);
  const auto t = ts::trajectory_from_thetas(th);
  StreamMonitor m;
  std::optional<TriggerWindow> first;
  for (const Sample& s : t.samples()) {
    if (auto w = m.step(s); w && !first) first = w;
  }
  ASSERT_TRUE(first);
  EXPECT_EQ(first->event.index, 1002u);
  EXPECT_EQ(first->samples.size(), 90u);
  EXPECT_EQ(first->end, first->event.index);
  EXPECT_EQ(first->samples.back().index, first->event.index - 1);
  EXPECT_EQ(first->samples.front().index, 1002u - 90u);
}

TEST(StreamMonitor, YoungStreamGetsShorterWindow) {
  std::vector<double> th(10, -kHalfPi);
  const auto t = ts::trajectory_from_thetas(th);
  StreamMonitor m;
  std::optional<TriggerWindow> w;
  for (const Sample& s : t.samples()) {
    if (auto out = m.step(s)) w = out;
  }
  ASSERT_TRUE(w);
  EXPECT_EQ(w->event.index, 2u);
  EXPECT_EQ(w->start, 0u);  // window + 2 samples are not available yet
}

TEST(StreamMonitor, RejectsOutOfOrderAndNonFinite) {
  StreamMonitor m;
  m.step({0, 0, 0, 0, {}});
  try {
    m.step({2, 0, 0, 0, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfOrder);
  }
  try {
    m.step({1, 0, 0, NAN, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidAngle);
  }
}

TEST(StreamMonitor, StreamEqualsBatchOnRandomInput) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    MonitorConfig c;
    c.refractory = 1 + rng() % 20;
    c.clip_lookback_to_event = rng() % 2 == 0;
    const auto t = ts::trajectory_from_thetas(ts::random_angles(rng, 50 + rng() % 400));
    StreamMonitor m(c);
    std::vector<TriggerWindow> streamed;
    for (const Sample& s : t.samples()) {
      if (auto w = m.step(s)) streamed.push_back(*w);
    }
    const auto batch = trigger_windows(t, c);
    ASSERT_EQ(streamed.size(), batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ASSERT_EQ(streamed[i].event, batch[i].event);
      ASSERT_EQ(streamed[i].start, batch[i].start);
      ASSERT_EQ(streamed[i].samples, batch[i].samples);
    }
  }
}

TEST(StreamMonitor, RunningSumTracksExactSum) {
  std::mt19937_64 rng(43);
  StreamMonitor m;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    m.step({i, 0, 0, ts::random_angles(rng, 1)[0], {}});
    ASSERT_NEAR(m.running_sum(), m.exact_window_sum(), 1e-12);
  }
}

TEST(TriggerWindows, ClippedWindowCoversClosedSegment) {
  std::vector<double> th(200, 0.0);
  for (std::size_t i = 60; i < 100; ++i) th[i] = -kHalfPi;
  const auto t = ts::trajectory_from_thetas(th);
  const auto windows = trigger_windows(t, MonitorConfig{});
  ASSERT_EQ(windows.size(), 2u);
  EXPECT_EQ(windows[0].start, 0u);
  EXPECT_EQ(windows[1].start, windows[0].event.index);
  EXPECT_EQ(windows[1].end, windows[1].event.index);

  MonitorConfig full;
  full.clip_lookback_to_event = false;
  const auto wide = trigger_windows(t, full);
  EXPECT_EQ(wide[1].samples.size(), 90u);
}
