#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "waggle/io.hpp"

using namespace waggle;
namespace ts = testing_support;

namespace {

Error catch_error(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorKind::Io, "none");
}

}  // namespace

TEST(ReadTrajectory, WellFormedFile) {
  std::istringstream in("index,x,y,theta,label\n5,0,0,0.1,1\n6,0.5,0.2,-0.2,-1\n7,1,1,3.0,\n");
  const auto t = io::read_trajectory(in);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].index, 0u);
  EXPECT_EQ(t[1].label, MoveLabel::TurnRight);
  EXPECT_EQ(t[2].label, std::nullopt);
}

TEST(ReadTrajectory, LabelOutOfDomain) {
  std::istringstream in("index,x,y,theta,label\n0,0,0,0,1\n1,0,0,0,2\n");
  const auto e = catch_error([&] { io::read_trajectory(in); });
  EXPECT_EQ(e.kind(), ErrorKind::InvalidLabel);
  EXPECT_EQ(e.position(), 3u);
}

TEST(ReadTrajectory, MalformedAndGaps) {
  std::istringstream bad("index,x,y,theta,label\n0,0,zero,0,1\n");
  auto e = catch_error([&] { io::read_trajectory(bad); });
  EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  EXPECT_EQ(e.position(), 2u);
  std::istringstream gap("index,x,y,theta,label\n0,0,0,0,1\n2,0,0,0,1\n");
  EXPECT_EQ(catch_error([&] { io::read_trajectory(gap); }).kind(), ErrorKind::GapError);
  std::istringstream header("idx,x,y\n");
  EXPECT_EQ(catch_error([&] { io::read_trajectory(header); }).kind(), ErrorKind::ParseError);
  std::istringstream nan("index,x,y,theta,label\n0,0,0,nan,1\n");
  EXPECT_EQ(catch_error([&] { io::read_trajectory(nan); }).kind(), ErrorKind::InvalidAngle);
}

TEST(ReadTrajectory, DegreesConvertOnce) {
  std::istringstream in("index,x,y,theta,label\n0,0,0,90,\n1,0,0,-180,\n");
  const auto t = io::read_trajectory(in, {.degrees = true});
  EXPECT_NEAR(t[0].theta, std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(t[1].theta, std::numbers::pi, 1e-15);
}

TEST(Trajectory, RoundTrip) {
  const auto d = generate_dance(DanceSpec{});
  std::stringstream buf;
  io::write_trajectory(buf, d.trajectory);
  const auto back = io::read_trajectory(buf);
  ASSERT_EQ(back.size(), d.trajectory.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_NEAR(back[i].theta, d.trajectory[i].theta, 1e-12);
    EXPECT_NEAR(back[i].x, d.trajectory[i].x, 1e-12);
    EXPECT_NEAR(back[i].y, d.trajectory[i].y, 1e-12);
    EXPECT_EQ(back[i].label, d.trajectory[i].label);
  }
}

TEST(Segments, RoundTrip) {
  const std::vector<Segment> segs{{0, 40, MoveLabel::Waggle}, {40, 90, std::nullopt}};
  std::stringstream buf;
  io::write_segments(buf, segs);
  EXPECT_EQ(io::read_segments(buf), segs);
}

TEST(Features, RoundTripExact) {
  const auto t = ts::blobs({{0.01, 0.9, MoveLabel::Waggle}, {-0.03, 0.4, MoveLabel::TurnRight}}, 20, 0.05, 3);
  std::stringstream buf;
  io::write_features(buf, t);
  EXPECT_EQ(io::read_features(buf).rows, t.rows);
}

TEST(Config, ParsesKeyValues) {
  std::istringstream in("# comment\nwindow = 5\n\nthreshold=-0.6\n");
  const auto kv = io::parse_config(in);
  EXPECT_EQ(kv.at("window"), "5");
  EXPECT_EQ(kv.at("threshold"), "-0.6");
  std::istringstream bad("window 5\n");
  EXPECT_EQ(catch_error([&] { io::parse_config(bad); }).kind(), ErrorKind::ParseError);
}

TEST(Files, MissingPathIsIoError) {
  EXPECT_EQ(catch_error([] { io::load_trajectory("/nonexistent/x.csv"); }).kind(), ErrorKind::Io);
}
