#pragma once

// Per-segment symbolic summary and the anchor distance used to compare two
// segments.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "actrep/error.hpp"
#include "actrep/features.hpp"
#include "actrep/primitive_fit.hpp"

namespace actrep {

struct KeypointSummary {
  PrimitiveKind kind = PrimitiveKind::Stationary;
  Point2 start;
  Point2 mid;
  Point2 end;
  friend bool operator==(const KeypointSummary&, const KeypointSummary&) = default;
};

using SignalTriple = std::array<double, 3>;  // start, mid, end

struct SegmentRepresentation {
  FrameIndex t_start = 0;
  FrameIndex t_end = 0;
  FrameIndex t_change = 0;
  std::string signal;  ///< name of the signal whose alarm produced the segment
  std::vector<KeypointSummary> keypoints;
  std::vector<SignalTriple> angles;
  std::vector<SignalTriple> bones;
  double scale = 1.0;  ///< torso length at t_start; 1 when the topology has no torso

  friend bool operator==(const SegmentRepresentation&, const SegmentRepresentation&) = default;
};

/// Anchors at tau = 0, 0.5, 1; signal triples at the first, floor-middle and
/// last frame of [t_start, t_end].
inline SegmentRepresentation summarize_segment(FrameIndex t_start, FrameIndex t_end,
                                               std::span<const FitResult> primitives,
                                               std::span<const FeatureSample> features) {
  if (!(t_start < t_end)) throw Error(ErrorCode::WindowMismatch, "segment must satisfy t_start < t_end");
  const auto needed = static_cast<std::size_t>(t_end - t_start + 1);
  if (features.size() != needed || features.front().t != t_start || features.back().t != t_end)
    throw Error(ErrorCode::WindowMismatch, "feature samples do not cover [" + std::to_string(t_start) + ", " +
                                               std::to_string(t_end) + "]");

  SegmentRepresentation rep;
  rep.t_start = t_start;
  rep.t_end = t_end;
  rep.keypoints.reserve(primitives.size());
  for (const auto& fit : primitives) {
    rep.keypoints.push_back({fit.kind(), eval_primitive(fit.primitive, 0.0), eval_primitive(fit.primitive, 0.5),
                             eval_primitive(fit.primitive, 1.0)});
  }

  const FeatureSample& first = features.front();
  const FeatureSample& middle = features[static_cast<std::size_t>((t_end - t_start) / 2)];
  const FeatureSample& last = features.back();
  for (std::size_t i = 0; i < first.angles.size(); ++i)
    rep.angles.push_back({first.angles[i], middle.angles[i], last.angles[i]});
  for (std::size_t i = 0; i < first.lengths.size(); ++i)
    rep.bones.push_back({first.lengths[i], middle.lengths[i], last.lengths[i]});
  return rep;
}

/// Sum over keypoints of the Euclidean distances between matching start, mid
/// and end anchors. Primitive kinds do not contribute.
inline double match_error(const SegmentRepresentation& r1, const SegmentRepresentation& r2) {
  if (r1.keypoints.size() != r2.keypoints.size())
    throw Error(ErrorCode::ShapeMismatch, "representations have different keypoint counts");
  double err = 0.0;
  for (std::size_t k = 0; k < r1.keypoints.size(); ++k) {
    const auto& a = r1.keypoints[k];
    const auto& b = r2.keypoints[k];
    err += distance(a.start, b.start) + distance(a.mid, b.mid) + distance(a.end, b.end);
  }
  return err;
}

struct MatchConfig {
  double tau = 0.05;
  bool strict_kinds = false;
};

/// Error normalized per anchor and by body scale (mean torso length of the
/// two segments).
inline double normalized_match_error(const SegmentRepresentation& r1, const SegmentRepresentation& r2) {
  const double anchors = 3.0 * static_cast<double>(r1.keypoints.size());
  if (anchors == 0.0) return 0.0;
  const double scale = 0.5 * (r1.scale + r2.scale);
  return match_error(r1, r2) / (anchors * (scale > 0.0 ? scale : 1.0));
}

inline bool is_match(const SegmentRepresentation& r1, const SegmentRepresentation& r2, const MatchConfig& config) {
  if (config.strict_kinds) {
    if (r1.keypoints.size() != r2.keypoints.size())
      throw Error(ErrorCode::ShapeMismatch, "representations have different keypoint counts");
    for (std::size_t k = 0; k < r1.keypoints.size(); ++k)
      if (r1.keypoints[k].kind != r2.keypoints[k].kind) return false;
  }
  return normalized_match_error(r1, r2) < config.tau;
}

}  // namespace actrep
