#pragma once

// Joint-angle and bone-length signals derived from 2D keypoint frames.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "actrep/error.hpp"
#include "actrep/geometry.hpp"

namespace actrep {

using FrameIndex = std::int64_t;

struct KeypointFrame {
  FrameIndex t = 0;
  std::vector<Point2> keypoints;
  std::vector<double> confidence;  ///< empty when the source has no scores

  bool has_confidence() const noexcept { return !confidence.empty(); }
};

struct JointSpec {
  std::string name;
  std::size_t a = 0;
  std::size_t b = 0;  ///< vertex of the angle
  std::size_t c = 0;
};

struct BoneSpec {
  std::string name;
  std::size_t a = 0;
  std::size_t b = 0;
};

/// Signals are numbered joints first, then bones.
class SkeletonTopology {
 public:
  SkeletonTopology() = default;
  SkeletonTopology(std::vector<JointSpec> joints, std::vector<BoneSpec> bones)
      : joints_(std::move(joints)), bones_(std::move(bones)) {
    validate();
  }

  const std::vector<JointSpec>& joints() const noexcept { return joints_; }
  const std::vector<BoneSpec>& bones() const noexcept { return bones_; }
  std::size_t signal_count() const noexcept { return joints_.size() + bones_.size(); }
  bool is_angle_signal(std::size_t signal) const noexcept { return signal < joints_.size(); }

  const std::string& signal_name(std::size_t signal) const {
    return signal < joints_.size() ? joints_.at(signal).name : bones_.at(signal - joints_.size()).name;
  }

  std::optional<std::size_t> find_signal(const std::string& name) const {
    for (std::size_t i = 0; i < signal_count(); ++i)
      if (signal_name(i) == name) return i;
    return std::nullopt;
  }

  /// Index into bones() of the bone named "torso", if any.
  std::optional<std::size_t> torso_bone() const {
    for (std::size_t i = 0; i < bones_.size(); ++i)
      if (bones_[i].name == "torso") return i;
    return std::nullopt;
  }

  std::size_t max_index() const noexcept {
    std::size_t m = 0;
    for (const auto& j : joints_) m = std::max({m, j.a, j.b, j.c});
    for (const auto& b : bones_) m = std::max({m, b.a, b.b});
    return m;
  }

  void check_covers(std::size_t keypoint_count) const {
    if (signal_count() > 0 && max_index() >= keypoint_count)
      throw Error(ErrorCode::TopologyMismatch, "topology references keypoint " + std::to_string(max_index()) +
                                                   " but frame has " + std::to_string(keypoint_count));
  }

 private:
  void validate() const {
    std::unordered_set<std::string> names;
    for (const auto& j : joints_) {
      if (j.a == j.b || j.b == j.c || j.a == j.c)
        throw Error(ErrorCode::TopologyMismatch, "joint '" + j.name + "' repeats a keypoint index");
      if (!names.insert(j.name).second) throw Error(ErrorCode::TopologyMismatch, "duplicate name '" + j.name + "'");
    }
    for (const auto& b : bones_) {
      if (b.a == b.b) throw Error(ErrorCode::TopologyMismatch, "bone '" + b.name + "' repeats a keypoint index");
      if (!names.insert(b.name).second) throw Error(ErrorCode::TopologyMismatch, "duplicate name '" + b.name + "'");
    }
  }

  std::vector<JointSpec> joints_;
  std::vector<BoneSpec> bones_;
};

/// Keypoint layout used by the default topology.
namespace kp {
inline constexpr std::size_t kNose = 0;
inline constexpr std::size_t kLeftShoulder = 1;
inline constexpr std::size_t kRightShoulder = 2;
inline constexpr std::size_t kLeftElbow = 3;
inline constexpr std::size_t kRightElbow = 4;
inline constexpr std::size_t kLeftWrist = 5;
inline constexpr std::size_t kRightWrist = 6;
inline constexpr std::size_t kLeftHip = 7;
inline constexpr std::size_t kRightHip = 8;
inline constexpr std::size_t kLeftKnee = 9;
inline constexpr std::size_t kRightKnee = 10;
inline constexpr std::size_t kLeftAnkle = 11;
inline constexpr std::size_t kRightAnkle = 12;
inline constexpr std::size_t kCount = 13;
}  // namespace kp

/// 8 joints (shoulders, elbows, hips, knees) and 9 bones (limbs plus torso).
inline SkeletonTopology default_topology() {
  using namespace kp;
  return SkeletonTopology(
      {
          {"left_shoulder", kLeftElbow, kLeftShoulder, kLeftHip},
          {"right_shoulder", kRightElbow, kRightShoulder, kRightHip},
          {"left_elbow", kLeftShoulder, kLeftElbow, kLeftWrist},
          {"right_elbow", kRightShoulder, kRightElbow, kRightWrist},
          {"left_hip", kLeftShoulder, kLeftHip, kLeftKnee},
          {"right_hip", kRightShoulder, kRightHip, kRightKnee},
          {"left_knee", kLeftHip, kLeftKnee, kLeftAnkle},
          {"right_knee", kRightHip, kRightKnee, kRightAnkle},
      },
      {
          {"left_upper_arm", kLeftShoulder, kLeftElbow},
          {"right_upper_arm", kRightShoulder, kRightElbow},
          {"left_forearm", kLeftElbow, kLeftWrist},
          {"right_forearm", kRightElbow, kRightWrist},
          {"left_thigh", kLeftHip, kLeftKnee},
          {"right_thigh", kRightHip, kRightKnee},
          {"left_calf", kLeftKnee, kLeftAnkle},
          {"right_calf", kRightKnee, kRightAnkle},
          {"torso", kLeftShoulder, kLeftHip},
      });
}

/// Angle at `b` between rays b->a and b->c, in degrees.
inline double joint_angle(Point2 a, Point2 b, Point2 c) {
  const Point2 u = a - b;
  const Point2 v = c - b;
  if (norm(u) == 0.0 || norm(v) == 0.0) throw Error(ErrorCode::DegenerateVector, "zero-length ray in joint angle");
  // atan2 of (|cross|, dot) equals arccos of the normalized dot product, without
  // the loss of precision acos has near 0 and 180 degrees.
  const double deg = rad_to_deg(std::atan2(std::abs(cross(u, v)), dot(u, v)));
  return std::clamp(deg, 0.0, 180.0);
}

inline double bone_length(Point2 a, Point2 b) noexcept { return distance(a, b); }

struct FeatureSample {
  FrameIndex t = 0;
  std::vector<double> angles;
  std::vector<double> lengths;

  /// Value of signal `i` using topology numbering (joints, then bones).
  double signal(std::size_t i) const { return i < angles.size() ? angles[i] : lengths.at(i - angles.size()); }
  std::size_t signal_count() const noexcept { return angles.size() + lengths.size(); }
  friend bool operator==(const FeatureSample&, const FeatureSample&) = default;
};

struct FeatureConfig {
  double confidence_floor = 0.5;
  bool normalize = false;  ///< divide coordinates by the torso length of each frame
};

/// Per-stream feature computation. Entries whose keypoints are unusable (low
/// confidence, non-finite, or a zero-length ray) repeat the previous valid value.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(SkeletonTopology topology, FeatureConfig config = {})
      : topology_(std::move(topology)), config_(config) {}

  const SkeletonTopology& topology() const noexcept { return topology_; }
  const FeatureConfig& config() const noexcept { return config_; }

  FeatureSample compute(const KeypointFrame& frame) {
    topology_.check_covers(frame.keypoints.size());
    if (frame.has_confidence() && frame.confidence.size() != frame.keypoints.size())
      throw Error(ErrorCode::TopologyMismatch, "confidence count differs from keypoint count");

    FeatureSample out;
    out.t = frame.t;
    out.angles.resize(topology_.joints().size());
    out.lengths.resize(topology_.bones().size());

    for (std::size_t i = 0; i < topology_.joints().size(); ++i) {
      const auto& j = topology_.joints()[i];
      std::optional<double> value;
      if (usable(frame, j.a) && usable(frame, j.b) && usable(frame, j.c)) {
        try {
          value = joint_angle(frame.keypoints[j.a], frame.keypoints[j.b], frame.keypoints[j.c]);
        } catch (const Error&) {
        }
      }
      out.angles[i] = value ? *value : carried(i, j.name);
    }
    const std::size_t nj = topology_.joints().size();
    for (std::size_t i = 0; i < topology_.bones().size(); ++i) {
      const auto& b = topology_.bones()[i];
      out.lengths[i] = usable(frame, b.a) && usable(frame, b.b)
                           ? bone_length(frame.keypoints[b.a], frame.keypoints[b.b])
                           : carried(nj + i, b.name);
    }
    previous_ = out;
    return out;
  }

  /// Applies the optional torso normalization to a frame's coordinates.
  KeypointFrame prepare(const KeypointFrame& frame) {
    if (!config_.normalize) return frame;
    const auto torso = topology_.torso_bone();
    if (!torso) throw Error(ErrorCode::TopologyMismatch, "normalization requires a bone named 'torso'");
    const auto& bone = topology_.bones()[*torso];
    topology_.check_covers(frame.keypoints.size());
    if (usable(frame, bone.a) && usable(frame, bone.b)) {
      const double len = bone_length(frame.keypoints[bone.a], frame.keypoints[bone.b]);
      if (len > 0.0) scale_ = len;
    }
    if (!scale_) throw Error(ErrorCode::NoPriorValue, "no valid torso length for normalization");
    KeypointFrame out = frame;
    for (auto& p : out.keypoints) p = p / *scale_;
    return out;
  }

  void reset() noexcept {
    previous_.reset();
    scale_.reset();
  }

 private:
  bool usable(const KeypointFrame& frame, std::size_t idx) const {
    if (!is_finite(frame.keypoints[idx])) return false;
    return !frame.has_confidence() || frame.confidence[idx] >= config_.confidence_floor;
  }

  double carried(std::size_t signal, const std::string& name) const {
    if (!previous_) throw Error(ErrorCode::NoPriorValue, "first frame has no valid value for '" + name + "'");
    return previous_->signal(signal);
  }

  SkeletonTopology topology_;
  FeatureConfig config_;
  std::optional<FeatureSample> previous_;
  std::optional<double> scale_;
};

}  // namespace actrep
