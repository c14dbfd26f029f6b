#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "waggle/error.hpp"
#include "waggle/signal.hpp"

namespace waggle {

/// Parameters of one synthetic dance. Each cycle is
/// [Waggle, TurnRight, Waggle, TurnLeft].
///
/// A waggle run holds the axis heading plus a square-wave body shake. A turn
/// rotates the heading monotonically through one full revolution (clockwise
/// for TurnRight, counter-clockwise for TurnLeft) in three constant-rate
/// pieces: a pivot of `pivot_len` samples onto the return leg, a slow arc of
/// width 2 * return_half_arc centred on the heading axis - pi/2, and a pivot
/// back onto the axis. With axis 0 the return leg keeps sin(theta) near -1.
struct DanceSpec {
  double waggle_axis = 0.0;  // radians
  std::size_t waggle_len = 60;
  std::size_t turn_len = 36;
  std::size_t n_cycles = 2;
  double waggle_osc_amplitude = 0.3;  // radians
  double waggle_osc_freq = 13.0;      // Hz
  double heading_noise_sd = 0.05;     // radians
  double rate_hz = 30.0;
  std::uint64_t seed = 0;
  std::size_t pivot_len = 4;
  double return_half_arc = 0.6;  // radians
  std::size_t min_segment_len = 15;

  void validate() const {
    auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSpec, what); };
    if (n_cycles < 1) fail("n_cycles must be >= 1");
    if (waggle_len < min_segment_len + 5 || turn_len < min_segment_len + 5) {
      fail("waggle_len and turn_len must be >= min_segment_len + 5");
    }
    if (turn_len < 2 * pivot_len + 1) fail("turn_len must exceed two pivots");
    if (!std::isfinite(waggle_axis) || !std::isfinite(waggle_osc_amplitude) ||
        !(waggle_osc_freq >= 0.0) || !(heading_noise_sd >= 0.0) || !(rate_hz > 0.0)) {
      fail("non-finite or negative kinematic parameter");
    }
    if (!(return_half_arc > 0.0 && return_half_arc < std::numbers::pi / 2)) {
      fail("return_half_arc must lie in (0, pi/2)");
    }
  }
};

struct LabeledDance {
  std::string id;
  DanceSpec spec;
  Trajectory trajectory;
  std::vector<Segment> truth;
};

namespace detail {

// Cumulative rotation after `s` samples of a turn: a fast pivot, a slow arc
// and a fast pivot, summing to 2 pi.
inline double turn_rotation(double s, double length, double pivot, double first, double arc) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (s <= pivot) return first * s / pivot;
  if (s <= length - pivot) return first + arc * (s - pivot) / (length - 2.0 * pivot);
  return first + arc + (two_pi - first - arc) * (s - (length - pivot)) / pivot;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline LabeledDance generate_dance(const DanceSpec& spec, std::string id = "synthetic") {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double half_pi = std::numbers::pi / 2;
  const double h = spec.return_half_arc;

  std::vector<Sample> samples;
  std::vector<Segment> truth;
  double x = 0.0, y = 0.0;
  auto emit = [&](double heading, MoveLabel label) {
    const double jitter = spec.heading_noise_sd > 0.0 ? spec.heading_noise_sd * noise(rng) : 0.0;
    const double theta = normalize_angle(heading + jitter);
    x += std::cos(theta) / spec.rate_hz;
    y += std::sin(theta) / spec.rate_hz;
    samples.push_back(Sample{samples.size(), x, y, theta, label});
  };
  auto waggle = [&] {
    const std::size_t start = samples.size();
    for (std::size_t k = 0; k < spec.waggle_len; ++k) {
      const double t = static_cast<double>(samples.size()) / spec.rate_hz;
      const double phase = std::sin(2.0 * std::numbers::pi * spec.waggle_osc_freq * t);
      emit(spec.waggle_axis + spec.waggle_osc_amplitude * (phase >= 0.0 ? 1.0 : -1.0), MoveLabel::Waggle);
    }
    truth.push_back(Segment{start, samples.size(), MoveLabel::Waggle});
  };
  auto turn = [&](MoveLabel label) {
    const bool right = label == MoveLabel::TurnRight;
    const double direction = right ? -1.0 : 1.0;
    // Pivot onto the return arc: short way round for a right turn.
    const double first = right ? half_pi - h : 3.0 * half_pi - h;
    const auto len = static_cast<double>(spec.turn_len);
    const auto pivot = static_cast<double>(spec.pivot_len);
    const std::size_t start = samples.size();
    for (std::size_t k = 0; k < spec.turn_len; ++k) {
      const double r = detail::turn_rotation(static_cast<double>(k) + 0.5, len, pivot, first, 2.0 * h);
      emit(spec.waggle_axis + direction * r, label);
    }
    truth.push_back(Segment{start, samples.size(), label});
  };

  for (std::size_t c = 0; c < spec.n_cycles; ++c) {
    waggle();
    turn(MoveLabel::TurnRight);
    waggle();
    turn(MoveLabel::TurnLeft);
  }
  return LabeledDance{std::move(id), spec, Trajectory(std::move(samples), spec.rate_hz), std::move(truth)};
}

template <typename T>
struct Range {
  T lo{};
  T hi{};
  bool valid() const { return lo <= hi; }
};

/// Uniform sampling ranges for generate_corpus.
struct DanceRanges {
  Range<double> waggle_axis{-0.05, 0.05};
  Range<std::size_t> waggle_len{45, 75};
  Range<std::size_t> turn_len{30, 45};
  Range<std::size_t> n_cycles{2, 4};
  Range<double> waggle_osc_amplitude{0.3, 0.3};
  Range<double> waggle_osc_freq{13.0, 13.0};
  Range<double> heading_noise_sd{0.05, 0.05};
  double rate_hz = 30.0;

  static DanceRanges single(const DanceSpec& s) {
    return DanceRanges{{s.waggle_axis, s.waggle_axis},
                       {s.waggle_len, s.waggle_len},
                       {s.turn_len, s.turn_len},
                       {s.n_cycles, s.n_cycles},
                       {s.waggle_osc_amplitude, s.waggle_osc_amplitude},
                       {s.waggle_osc_freq, s.waggle_osc_freq},
                       {s.heading_noise_sd, s.heading_noise_sd},
                       s.rate_hz};
  }
};

inline constexpr std::size_t kDefaultCorpusSize = 20;

/// Dance i draws its spec from `ranges` with a generator seeded from
/// (seed, i); its own noise seed is derived the same way.
inline std::vector<LabeledDance> generate_corpus(std::size_t n_dances, const DanceRanges& ranges,
                                                 std::uint64_t seed) {
  if (n_dances < 1) throw Error(ErrorKind::InvalidSpec, "corpus needs at least one dance");
  if (!ranges.waggle_axis.valid() || !ranges.waggle_len.valid() || !ranges.turn_len.valid() ||
      !ranges.n_cycles.valid() || !ranges.waggle_osc_amplitude.valid() ||
      !ranges.waggle_osc_freq.valid() || !ranges.heading_noise_sd.valid()) {
    throw Error(ErrorKind::InvalidSpec, "empty sampling range");
  }
  std::vector<LabeledDance> out;
  out.reserve(n_dances);
  for (std::size_t i = 0; i < n_dances; ++i) {
    const std::uint64_t dance_seed = detail::splitmix64(seed ^ detail::splitmix64(i));
    std::mt19937_64 rng(dance_seed);
    auto real = [&](const Range<double>& r) {
      return r.lo == r.hi ? r.lo : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    };
    auto integer = [&](const Range<std::size_t>& r) {
      return r.lo == r.hi ? r.lo : std::uniform_int_distribution<std::size_t>(r.lo, r.hi)(rng);
    };
    DanceSpec spec;
    spec.waggle_axis = real(ranges.waggle_axis);
    spec.waggle_len = integer(ranges.waggle_len);
    spec.turn_len = integer(ranges.turn_len);
    spec.n_cycles = integer(ranges.n_cycles);
    spec.waggle_osc_amplitude = real(ranges.waggle_osc_amplitude);
    spec.waggle_osc_freq = real(ranges.waggle_osc_freq);
    spec.heading_noise_sd = real(ranges.heading_noise_sd);
    spec.rate_hz = ranges.rate_hz;
    spec.seed = detail::splitmix64(dance_seed);
    char id[32];
    std::snprintf(id, sizeof id, "dance_%03zu", i);
    out.push_back(generate_dance(spec, id));
  }
  return out;
}

}  // namespace waggle
