#pragma once

// Scripted keypoint streams with known segment boundaries and repetition
// counts. Each keypoint follows its own timeline of hold / line / arc phases;
// the timeline is replayed `repeat` times.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "actrep/error.hpp"
#include "actrep/features.hpp"
#include "actrep/geometry.hpp"

namespace actrep::synth {

struct Hold {
  std::optional<Point2> at;  ///< defaults to where the previous phase ended
};

struct Line {
  Point2 from;
  Point2 to;
};

struct Arc {
  Point2 center;
  double radius = 0.0;
  double theta0 = 0.0;  ///< radians
  double theta1 = 0.0;
};

using Shape = std::variant<Hold, Line, Arc>;

struct Phase {
  Shape shape;
  FrameIndex frames = 1;
};

struct MotionScript {
  std::size_t keypoints = 0;
  std::vector<std::vector<Phase>> timelines;  ///< one per keypoint
  double noise = 0.0;                         ///< per-coordinate Gaussian sigma
  int repeat = 1;
};

struct Interval {
  FrameIndex start = 0;
  FrameIndex end = 0;  ///< first frame at which the phase's final position is reached
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

struct GroundTruth {
  std::vector<Interval> segments;
  int count = 0;
};

struct Stream {
  std::vector<KeypointFrame> frames;
  GroundTruth truth;
};

/// Counter-based Gaussian noise: every value depends only on
/// (seed, frame, keypoint, coordinate), so streams are reproducible in any
/// evaluation order.
///
///   key  = splitmix64(seed ^ splitmix64(frame * 0x9E3779B97F4A7C15
///                                       + keypoint * 2 + coordinate))
///   u1   = (splitmix64(key ^ 0x243F6A8885A308D3) >> 11 + 1) * 2^-53
///   u2   = (splitmix64(key ^ 0x13198A2E03707344) >> 11) * 2^-53
///   z    = sqrt(-2 ln u1) * cos(2 pi u2)
class CounterNoise {
 public:
  explicit CounterNoise(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  double normal(std::uint64_t frame, std::uint64_t keypoint, std::uint64_t coord) const noexcept {
    const std::uint64_t key = splitmix64(seed_ ^ splitmix64(frame * 0x9E3779B97F4A7C15ULL + keypoint * 2 + coord));
    constexpr double inv53 = 1.0 / 9007199254740992.0;
    const double u1 = static_cast<double>((splitmix64(key ^ 0x243F6A8885A308D3ULL) >> 11) + 1) * inv53;
    const double u2 = static_cast<double>(splitmix64(key ^ 0x13198A2E03707344ULL) >> 11) * inv53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t seed_;
};

namespace detail {

inline std::optional<Point2> end_point(const Shape& s) {
  if (const auto* h = std::get_if<Hold>(&s)) return h->at;
  if (const auto* l = std::get_if<Line>(&s)) return l->to;
  const auto& a = std::get<Arc>(s);
  return a.center + a.radius * Point2{std::cos(a.theta1), std::sin(a.theta1)};
}

/// Position at fraction u in [0, 1) of the phase.
inline Point2 position(const Shape& s, double u, Point2 hold_at) {
  if (std::holds_alternative<Hold>(s)) return hold_at;
  if (const auto* l = std::get_if<Line>(&s)) return l->from + u * (l->to - l->from);
  const auto& a = std::get<Arc>(s);
  const double th = a.theta0 + u * (a.theta1 - a.theta0);
  return a.center + a.radius * Point2{std::cos(th), std::sin(th)};
}

/// Where each hold phase sits: its own point, or the end of the closest
/// earlier phase in cyclic order.
inline std::vector<Point2> hold_points(const std::vector<Phase>& timeline, std::size_t keypoint) {
  std::vector<Point2> out(timeline.size());
  const std::size_t n = timeline.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::holds_alternative<Hold>(timeline[i].shape)) continue;
    std::optional<Point2> p = std::get<Hold>(timeline[i].shape).at;
    for (std::size_t back = 1; !p && back <= n; ++back) p = end_point(timeline[(i + n - back) % n].shape);
    if (!p) throw Error(ErrorCode::InvalidScript, "keypoint " + std::to_string(keypoint) + " has no anchored position");
    out[i] = *p;
  }
  return out;
}

}  // namespace detail

inline FrameIndex cycle_length(const std::vector<Phase>& timeline) {
  FrameIndex total = 0;
  for (const auto& p : timeline) total += p.frames;
  return total;
}

inline void validate(const MotionScript& script) {
  if (script.timelines.size() != script.keypoints)
    throw Error(ErrorCode::InvalidScript, "expected one timeline per keypoint");
  if (script.keypoints == 0) throw Error(ErrorCode::InvalidScript, "script has no keypoints");
  if (script.repeat < 1) throw Error(ErrorCode::InvalidScript, "repeat must be at least 1");
  if (!(script.noise >= 0.0)) throw Error(ErrorCode::InvalidScript, "noise must be non-negative");
  const FrameIndex len = cycle_length(script.timelines.front());
  for (const auto& tl : script.timelines) {
    if (tl.empty()) throw Error(ErrorCode::InvalidScript, "empty timeline");
    for (const auto& p : tl)
      if (p.frames < 1) throw Error(ErrorCode::InvalidScript, "phase durations must be at least 1 frame");
    if (cycle_length(tl) != len) throw Error(ErrorCode::InvalidScript, "timelines differ in cycle length");
  }
}

inline Stream generate_stream(const MotionScript& script, std::uint64_t seed) {
  validate(script);
  const FrameIndex cycle = cycle_length(script.timelines.front());
  const FrameIndex total = cycle * script.repeat;
  const CounterNoise noise(seed);

  Stream out;
  out.frames.resize(static_cast<std::size_t>(total));
  for (FrameIndex t = 0; t < total; ++t) {
    auto& f = out.frames[static_cast<std::size_t>(t)];
    f.t = t;
    f.keypoints.resize(script.keypoints);
  }

  std::set<Interval> segments;
  for (std::size_t k = 0; k < script.keypoints; ++k) {
    const auto& tl = script.timelines[k];
    const auto holds = detail::hold_points(tl, k);
    for (int rep = 0; rep < script.repeat; ++rep) {
      FrameIndex start = rep * cycle;
      for (std::size_t i = 0; i < tl.size(); ++i) {
        const Phase& ph = tl[i];
        for (FrameIndex j = 0; j < ph.frames; ++j) {
          const double u = static_cast<double>(j) / static_cast<double>(ph.frames);
          out.frames[static_cast<std::size_t>(start + j)].keypoints[k] = detail::position(ph.shape, u, holds[i]);
        }
        if (!std::holds_alternative<Hold>(ph.shape)) segments.insert({start, start + ph.frames});
        start += ph.frames;
      }
    }
  }

  if (script.noise > 0.0) {
    for (auto& f : out.frames) {
      for (std::size_t k = 0; k < f.keypoints.size(); ++k) {
        const auto t = static_cast<std::uint64_t>(f.t);
        f.keypoints[k].x += script.noise * noise.normal(t, k, 0);
        f.keypoints[k].y += script.noise * noise.normal(t, k, 1);
      }
    }
  }

  out.truth.segments.assign(segments.begin(), segments.end());
  out.truth.count = script.repeat;
  return out;
}

}  // namespace actrep::synth
