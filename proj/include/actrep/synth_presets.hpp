#pragma once

// Canned exercise scripts on the default 13-keypoint layout, in coordinates
// normalized to the unit square (y pointing down).

#include <array>
#include <cstddef>
#include <vector>

#include "actrep/features.hpp"
#include "actrep/synth.hpp"

namespace actrep::synth::presets {

struct Timing {
  FrameIndex move_up = 20;
  FrameIndex hold_up = 10;
  FrameIndex move_down = 20;
  FrameIndex hold_down = 10;
};

namespace detail {

inline Point2 polar(Point2 center, double radius, double deg) {
  const double r = deg_to_rad(deg);
  return center + radius * Point2{std::cos(r), std::sin(r)};
}

inline constexpr double kUpperArm = 0.12;
inline constexpr double kArm = 0.24;
inline constexpr double kThigh = 0.17;
inline constexpr double kShin = 0.18;

struct Pose {
  std::array<Point2, kp::kCount> p;
};

/// Standing with arms hanging slightly away from the body.
inline Pose standing() {
  using namespace kp;
  Pose pose;
  pose.p[kNose] = {0.50, 0.15};
  pose.p[kLeftShoulder] = {0.58, 0.30};
  pose.p[kRightShoulder] = {0.42, 0.30};
  pose.p[kLeftElbow] = polar(pose.p[kLeftShoulder], kUpperArm, 80.0);
  pose.p[kRightElbow] = polar(pose.p[kRightShoulder], kUpperArm, 100.0);
  pose.p[kLeftWrist] = polar(pose.p[kLeftShoulder], kArm, 80.0);
  pose.p[kRightWrist] = polar(pose.p[kRightShoulder], kArm, 100.0);
  pose.p[kLeftHip] = {0.55, 0.55};
  pose.p[kRightHip] = {0.45, 0.55};
  pose.p[kLeftKnee] = pose.p[kLeftHip] + Point2{0.0, kThigh};
  pose.p[kRightKnee] = pose.p[kRightHip] + Point2{0.0, kThigh};
  pose.p[kLeftAnkle] = pose.p[kLeftKnee] + Point2{0.0, kShin};
  pose.p[kRightAnkle] = pose.p[kRightKnee] + Point2{0.0, kShin};
  return pose;
}

inline Arc arc_deg(Point2 c, double r, double from, double to) { return Arc{c, r, deg_to_rad(from), deg_to_rad(to)}; }

/// Timeline for a keypoint that moves out and back once per cycle.
inline std::vector<Phase> out_and_back(const Shape& out, const Shape& back, const Timing& t) {
  return {{out, t.move_up}, {Hold{}, t.hold_up}, {back, t.move_down}, {Hold{}, t.hold_down}};
}

inline std::vector<Phase> still(Point2 at, FrameIndex frames) { return {{Hold{at}, frames}}; }

inline FrameIndex cycle(const Timing& t) { return t.move_up + t.hold_up + t.move_down + t.hold_down; }

inline MotionScript still_script(const Pose& pose, FrameIndex frames, int repeat, double noise) {
  MotionScript s;
  s.keypoints = kp::kCount;
  s.noise = noise;
  s.repeat = repeat;
  for (const auto& p : pose.p) s.timelines.push_back(still(p, frames));
  return s;
}

}  // namespace detail

/// Both arms sweep from the hips to above the head while the feet step out.
inline MotionScript jumping_jack(const Timing& t, int repeat, double noise = 0.0) {
  using namespace kp;
  using namespace detail;
  const Pose pose = standing();
  MotionScript s = still_script(pose, cycle(t), repeat, noise);
  const Point2 ls = pose.p[kLeftShoulder], rs = pose.p[kRightShoulder];
  s.timelines[kLeftElbow] = out_and_back(arc_deg(ls, kUpperArm, 80, -60), arc_deg(ls, kUpperArm, -60, 80), t);
  s.timelines[kLeftWrist] = out_and_back(arc_deg(ls, kArm, 80, -60), arc_deg(ls, kArm, -60, 80), t);
  s.timelines[kRightElbow] = out_and_back(arc_deg(rs, kUpperArm, 100, 240), arc_deg(rs, kUpperArm, 240, 100), t);
  s.timelines[kRightWrist] = out_and_back(arc_deg(rs, kArm, 100, 240), arc_deg(rs, kArm, 240, 100), t);
  for (auto [knee, ankle, sign] : {std::tuple{kLeftKnee, kLeftAnkle, 1.0}, std::tuple{kRightKnee, kRightAnkle, -1.0}}) {
    const Point2 k0 = pose.p[knee], a0 = pose.p[ankle];
    const Point2 k1 = k0 + Point2{sign * 0.04, 0.0}, a1 = a0 + Point2{sign * 0.08, 0.0};
    s.timelines[knee] = out_and_back(Line{k0, k1}, Line{k1, k0}, t);
    s.timelines[ankle] = out_and_back(Line{a0, a1}, Line{a1, a0}, t);
  }
  return s;
}

/// Lateral raise: straight arms from the hips up to shoulder height.
inline MotionScript arm_raise(const Timing& t, int repeat, double noise = 0.0) {
  using namespace kp;
  using namespace detail;
  const Pose pose = standing();
  MotionScript s = still_script(pose, cycle(t), repeat, noise);
  const Point2 ls = pose.p[kLeftShoulder], rs = pose.p[kRightShoulder];
  s.timelines[kLeftElbow] = out_and_back(arc_deg(ls, kUpperArm, 80, 0), arc_deg(ls, kUpperArm, 0, 80), t);
  s.timelines[kLeftWrist] = out_and_back(arc_deg(ls, kArm, 80, 0), arc_deg(ls, kArm, 0, 80), t);
  s.timelines[kRightElbow] = out_and_back(arc_deg(rs, kUpperArm, 100, 180), arc_deg(rs, kUpperArm, 180, 100), t);
  s.timelines[kRightWrist] = out_and_back(arc_deg(rs, kArm, 100, 180), arc_deg(rs, kArm, 180, 100), t);
  return s;
}

/// Squat: the upper body drops while the knees travel outwards.
inline MotionScript squat(const Timing& t, int repeat, double noise = 0.0) {
  using namespace kp;
  using namespace detail;
  const Pose pose = standing();
  MotionScript s = still_script(pose, cycle(t), repeat, noise);
  const Point2 drop{0.0, 0.12};
  for (std::size_t k : {kNose, kLeftShoulder, kRightShoulder, kLeftElbow, kRightElbow, kLeftWrist, kRightWrist,
                        kLeftHip, kRightHip}) {
    const Point2 p0 = pose.p[k], p1 = p0 + drop;
    s.timelines[k] = out_and_back(Line{p0, p1}, Line{p1, p0}, t);
  }
  for (auto [knee, sign] : {std::pair{kLeftKnee, 1.0}, std::pair{kRightKnee, -1.0}}) {
    const Point2 p0 = pose.p[knee], p1 = p0 + Point2{sign * 0.08, -0.02};
    s.timelines[knee] = out_and_back(Line{p0, p1}, Line{p1, p0}, t);
  }
  return s;
}

/// High knee march: left knee up and down, then the right; one repetition
/// covers both legs.
inline MotionScript knee_march(const Timing& t, int repeat, double noise = 0.0) {
  using namespace kp;
  using namespace detail;
  const Pose pose = standing();
  const FrameIndex half = cycle(t);
  MotionScript s = still_script(pose, 2 * half, repeat, noise);
  auto leg = [&](std::size_t hip, std::size_t knee, std::size_t ankle, double lift_deg, bool first) {
    const Point2 h = pose.p[hip];
    const Point2 k0 = pose.p[knee], a0 = pose.p[ankle];
    const Point2 k1 = polar(h, kThigh, lift_deg);
    const Point2 a1 = k1 + Point2{0.0, kShin};
    auto knee_tl = out_and_back(arc_deg(h, kThigh, 90, lift_deg), arc_deg(h, kThigh, lift_deg, 90), t);
    auto ankle_tl = out_and_back(Line{a0, a1}, Line{a1, a0}, t);
    const Phase rest_knee{Hold{k0}, half}, rest_ankle{Hold{a0}, half};
    if (first) {
      knee_tl.push_back(rest_knee);
      ankle_tl.push_back(rest_ankle);
    } else {
      knee_tl.insert(knee_tl.begin(), rest_knee);
      ankle_tl.insert(ankle_tl.begin(), rest_ankle);
    }
    s.timelines[knee] = knee_tl;
    s.timelines[ankle] = ankle_tl;
  };
  leg(kLeftHip, kLeftKnee, kLeftAnkle, 10.0, true);
  leg(kRightHip, kRightKnee, kRightAnkle, 170.0, false);
  return s;
}

}  // namespace actrep::synth::presets
