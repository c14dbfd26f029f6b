#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <vector>

#include "support.hpp"
#include "waggle/features.hpp"
#include "waggle/synth.hpp"

using namespace waggle;
namespace ts = testing_support;

TEST(ExtractFeatures, ConstantHeadings) {
  for (std::size_t n : {5u, 6u, 40u}) {
    EXPECT_EQ(extract_features(std::vector<double>(n, 0.0)), (FeatureVector{0.0, 1.0}));
    EXPECT_EQ(extract_features(std::vector<double>(n, std::numbers::pi)), (FeatureVector{0.0, -1.0}));
  }
}

TEST(ExtractFeatures, StepFromPiToZero) {
  const double pi = std::numbers::pi;
  const auto f = extract_features(std::vector<double>{pi, pi, pi, 0, 0, 0});
  EXPECT_NEAR(f.x1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(f.x2, 1.0);
}

TEST(ExtractFeatures, TooShort) {
  try {
    extract_features(std::vector<double>(4, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooShort);
  }
}

TEST(ExtractFeatures, MatchesNaivePipelineAndTelescopes) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto th = ts::random_angles(rng, 5 + rng() % 120);
    std::vector<double> c;
    for (double t : th) c.push_back(std::cos(t));
    const auto ma = ts::naive_moving_average(c, 3);
    const auto f = extract_features(th);
    ASSERT_NEAR(f.x1, (ma.back() - ma.front()) / static_cast<double>(ma.size() - 1), 1e-9);
    ASSERT_NEAR(f.x2, *std::max_element(ma.begin(), ma.end()), 1e-12);
  }
}

TEST(ExtractFeatures, NotRotationInvariant) {
  std::mt19937_64 rng(52);
  const auto th = ts::random_angles(rng, 30);
  auto rotated = th;
  for (double& t : rotated) t += 0.5;
  EXPECT_NE(extract_features(th), extract_features(rotated));
}

TEST(BuildFeatureTable, SingleWaggleSegment) {
  const auto t = ts::trajectory_from_thetas(std::vector<double>(30, 0.1), MoveLabel::Waggle);
  const std::vector<Segment> segs{{0, 30, {}}};
  const auto table = build_feature_table(t, segs, "b");
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.rows[0].label, MoveLabel::Waggle);
  EXPECT_EQ(table.rows[0].source, (SourceId{"b", 0}));
}

TEST(BuildFeatureTable, SyntheticSegmentsCarryTruthLabels) {
  DanceSpec spec;
  spec.n_cycles = 1;
  spec.heading_noise_sd = 0.0;
  const auto dance = generate_dance(spec);
  // First three truth segments, re-tiled over their own span.
  const Trajectory head(std::vector<Sample>(dance.trajectory.samples().begin(),
                                            dance.trajectory.samples().begin() +
                                                static_cast<std::ptrdiff_t>(dance.truth[2].end)));
  const std::vector<Segment> segs(dance.truth.begin(), dance.truth.begin() + 3);
  const auto table = build_feature_table(head, segs, "s");
  ASSERT_EQ(table.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(table.rows[i].label, dance.truth[i].label);
}

TEST(BuildFeatureTable, RejectsUndersizedSegmentWithOrdinal) {
  const auto t = ts::trajectory_from_thetas(std::vector<double>(30, 0.0));
  const std::vector<Segment> segs{{0, 26, {}}, {26, 30, {}}};
  try {
    build_feature_table(t, segs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooShort);
    EXPECT_EQ(e.position(), 1u);
  }
}

TEST(BuildFeatureTable, RejectsNonTiling) {
  const auto t = ts::trajectory_from_thetas(std::vector<double>(30, 0.0));
  const std::vector<Segment> segs{{0, 10, {}}, {12, 30, {}}};
  EXPECT_THROW(build_feature_table(t, segs), Error);
}

TEST(Standardizer, TwoPointFormula) {
  FeatureTable t;
  t.rows = {ts::row(0, 0, MoveLabel::Waggle), ts::row(2, 4, MoveLabel::Waggle)};
  const auto s = Standardizer::fit(t);
  EXPECT_EQ(s.mean(), (std::array<double, 2>{1, 2}));
  const auto out = s.apply(t);
  const double r = std::sqrt(0.5);
  EXPECT_NEAR(out.rows[0].features.x1, -r, 1e-12);
  EXPECT_NEAR(out.rows[0].features.x2, -r, 1e-12);
  EXPECT_NEAR(out.rows[1].features.x1, r, 1e-12);
  EXPECT_NEAR(out.rows[1].features.x2, r, 1e-12);
}

TEST(Standardizer, DegenerateColumnGoesToZero) {
  FeatureTable t;
  t.rows = {ts::row(3, 0, MoveLabel::Waggle), ts::row(3, 1, MoveLabel::Waggle), ts::row(3, 5, MoveLabel::Waggle)};
  const auto s = Standardizer::fit(t);
  EXPECT_EQ(s.stddev()[0], Standardizer::kMinStd);
  for (const auto& r : s.apply(t).rows) EXPECT_EQ(r.features.x1, 0.0);
}

TEST(Standardizer, RoundTripAndErrors) {
  std::mt19937_64 rng(53);
  FeatureTable t;
  for (int i = 0; i < 50; ++i) {
    const auto v = ts::random_series(rng, 2, -5, 5);
    t.rows.push_back(ts::row(v[0], v[1], MoveLabel::TurnLeft));
  }
  const auto s = Standardizer::fit(t);
  for (const auto& r : t.rows) {
    const auto back = s.invert(s.apply(r.features));
    EXPECT_NEAR(back.x1, r.features.x1, 1e-9);
    EXPECT_NEAR(back.x2, r.features.x2, 1e-9);
  }
  FeatureTable one;
  one.rows = {ts::row(1, 1, MoveLabel::Waggle)};
  try {
    Standardizer::fit(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewRows);
  }
}
