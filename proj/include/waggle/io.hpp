#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "waggle/classifier.hpp"
#include "waggle/error.hpp"
#include "waggle/features.hpp"
#include "waggle/signal.hpp"

namespace waggle::io {

inline constexpr std::string_view kTrajectoryHeader = "index,x,y,theta,label";
inline constexpr std::string_view kSegmentsHeader = "segment_idx,start,end,label";
inline constexpr std::string_view kFeaturesHeader = "bee_id,segment_idx,x1,x2,label";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw Error(ErrorKind::ParseError, "malformed number '" + std::string(token) + "'", line);
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view token, std::size_t line) {
  Int v{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw Error(ErrorKind::ParseError, "malformed integer '" + std::string(token) + "'", line);
  }
  return v;
}

inline std::optional<MoveLabel> parse_label(std::string_view token, std::size_t line) {
  if (token.empty()) return std::nullopt;
  const int code = parse_int<int>(token, line);
  const auto label = label_from_code(code);
  if (!label) throw Error(ErrorKind::InvalidLabel, "label must be -1, 0 or 1, got " + std::string(token), line);
  return label;
}

inline std::string label_field(const std::optional<MoveLabel>& label) {
  return label ? std::to_string(label_code(*label)) : std::string();
}

inline void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "missing header", 1);
  if (trim(line) != header) {
    throw Error(ErrorKind::ParseError, "expected header '" + std::string(header) + "'", 1);
  }
}

}  // namespace detail

using waggle::detail::format_number;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Trajectories

struct LoadOptions {
  bool degrees = false;
  double rate_hz = Trajectory::kDefaultRateHz;
};

/// Parses `index,x,y,theta,label` rows. Indices must be consecutive; they are
/// re-based to start at 0. Error positions are 1-based line numbers.
inline Trajectory read_trajectory(std::istream& in, const LoadOptions& options = {}) {
  detail::expect_header(in, kTrajectoryHeader);
  std::vector<Sample> samples;
  std::optional<std::uint64_t> first_index;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 5) throw Error(ErrorKind::ParseError, "expected 5 fields", line_no);
    const auto index = detail::parse_int<std::uint64_t>(fields[0], line_no);
    Sample s;
    s.x = detail::parse_double(fields[1], line_no);
    s.y = detail::parse_double(fields[2], line_no);
    s.theta = detail::parse_double(fields[3], line_no);
    s.label = detail::parse_label(fields[4], line_no);
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw Error(ErrorKind::ParseError, "non-finite body coordinate", line_no);
    }
    if (!std::isfinite(s.theta)) throw Error(ErrorKind::InvalidAngle, "non-finite theta", line_no);
    if (options.degrees) s.theta *= std::numbers::pi / 180.0;
    if (!first_index) first_index = index;
    const std::uint64_t expected = *first_index + samples.size();
    if (index != expected) {
      throw Error(ErrorKind::GapError,
                  "index " + std::to_string(index) + " where " + std::to_string(expected) + " was expected",
                  line_no);
    }
    s.index = samples.size();
    samples.push_back(s);
  }
  return Trajectory(std::move(samples), options.rate_hz);
}

inline Trajectory load_trajectory(const std::filesystem::path& path, const LoadOptions& options = {}) {
  std::ifstream in = open_input(path);
  return read_trajectory(in, options);
}

inline void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const Sample& s : trajectory.samples()) {
    out << s.index << ',' << format_number(s.x) << ',' << format_number(s.y) << ','
        << format_number(s.theta) << ',' << detail::label_field(s.label) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Segments

inline void write_segments(std::ostream& out, std::span<const Segment> segments) {
  out << kSegmentsHeader << '\n';
  for (std::size_t k = 0; k < segments.size(); ++k) {
    out << k << ',' << segments[k].start << ',' << segments[k].end << ','
        << detail::label_field(segments[k].label) << '\n';
  }
}

inline std::vector<Segment> read_segments(std::istream& in) {
  detail::expect_header(in, kSegmentsHeader);
  std::vector<Segment> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 4) throw Error(ErrorKind::ParseError, "expected 4 fields", line_no);
    Segment s;
    s.start = detail::parse_int<std::size_t>(f[1], line_no);
    s.end = detail::parse_int<std::size_t>(f[2], line_no);
    s.label = detail::parse_label(f[3], line_no);
    if (s.end <= s.start) throw Error(ErrorKind::ParseError, "segment end must exceed start", line_no);
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature tables

inline void write_features(std::ostream& out, const FeatureTable& table) {
  out << kFeaturesHeader << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const FeatureRow& r = table.rows[i];
    if (r.source.bee_id.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "bee id may not contain commas or newlines", i);
    }
    out << r.source.bee_id << ',' << r.source.segment_idx << ',' << format_number(r.features.x1) << ','
        << format_number(r.features.x2) << ',' << detail::label_field(r.label) << '\n';
  }
}

inline FeatureTable read_features(std::istream& in) {
  detail::expect_header(in, kFeaturesHeader);
  FeatureTable table;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 5) throw Error(ErrorKind::ParseError, "expected 5 fields", line_no);
    FeatureRow row;
    row.source.bee_id = std::string(f[0]);
    row.source.segment_idx = detail::parse_int<std::size_t>(f[1], line_no);
    row.features = {detail::parse_double(f[2], line_no), detail::parse_double(f[3], line_no)};
    if (!row.features.finite()) throw Error(ErrorKind::ParseError, "non-finite feature", line_no);
    row.label = detail::parse_label(f[4], line_no);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FeatureTable load_features(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_features(in);
}

// ---------------------------------------------------------------------------
// Models and key=value config files

inline ClassifierModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_file(path));
}

/// `key=value` lines; blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "expected key=value", line_no);
    const auto key = detail::trim(t.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ParseError, "empty key", line_no);
    out[std::string(key)] = std::string(detail::trim(t.substr(eq + 1)));
  }
  return out;
}

}  // namespace waggle::io
