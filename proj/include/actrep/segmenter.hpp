#pragma once

// Online temporal segmentation: per-signal CuSum, alarm arbitration, a
// bounded wait for the end-time estimate, then primitive fitting over the
// clipped window.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "actrep/changepoint.hpp"
#include "actrep/error.hpp"
#include "actrep/features.hpp"
#include "actrep/primitive_fit.hpp"
#include "actrep/representation.hpp"

namespace actrep {

struct SegmenterConfig {
  double threshold_angle = 30.0;              ///< degrees
  std::optional<double> threshold_bone;       ///< absolute; derived when unset
  double threshold_bone_rel = 0.15;           ///< fraction of the first frame's torso length
  double drift = 1.0;  ///< angle units per frame; bones use drift * h_bone / h_angle
  FrameIndex w_min = 20;
  std::size_t smoothing_window = 3;
  FrameIndex min_segment_len = 4;
  bool refractory = true;
  std::size_t buffer_capacity = 512;
  FeatureConfig features;
  FitConfig fit;
};

struct SegmentEvent {
  SegmentRepresentation rep;
  FrameIndex horizon = 0;     ///< W used for the end-time window
  FrameIndex emitted_at = 0;  ///< frame index being processed when emitted
};

class OnlineSegmenter {
 public:
  explicit OnlineSegmenter(SkeletonTopology topology, SegmenterConfig config = {})
      : config_(config), extractor_(std::move(topology), config.features) {
    const auto n = extractor_.topology().signal_count();
    smoothers_.assign(n, MovingAverage(config_.smoothing_window));
    for (std::size_t i = 0; i < n; ++i) detectors_.emplace_back(CusumParams{0.0, config_.drift}, i);
  }

  const SkeletonTopology& topology() const noexcept { return extractor_.topology(); }
  const SegmenterConfig& config() const noexcept { return config_; }
  const std::optional<ChangeAlarm>& pending() const noexcept { return pending_; }
  const std::vector<CusumDetector>& detectors() const noexcept { return detectors_; }

  std::vector<SegmentEvent> push_frame(const KeypointFrame& raw) {
    if (last_t_ && raw.t != *last_t_ + 1)
      throw Error(ErrorCode::NonConsecutiveFrame,
                  "expected frame " + std::to_string(*last_t_ + 1) + ", got " + std::to_string(raw.t));
    if (!last_t_ && raw.t < 0) throw Error(ErrorCode::NonConsecutiveFrame, "frame index must be non-negative");

    Slot slot;
    slot.frame = extractor_.prepare(raw);
    slot.sample = extractor_.compute(slot.frame);
    carry_positions(slot.frame);
    slot.signals.resize(smoothers_.size());
    for (std::size_t i = 0; i < smoothers_.size(); ++i) slot.signals[i] = smoothers_[i](slot.sample.signal(i));
    if (!last_t_) init_thresholds(slot.sample);
    last_t_ = raw.t;
    buffer_.push_back(std::move(slot));
    while (buffer_.size() > config_.buffer_capacity) buffer_.pop_front();

    const FrameIndex t = raw.t;
    const bool may_update = config_.refractory ? (!pending_ && t > refractory_until_) : true;
    if (may_update) {
      std::optional<ChangeAlarm> best;
      for (std::size_t i = 0; i < detectors_.size(); ++i) {
        auto alarm = detectors_[i].update(buffer_.back().signals[i], t);
        if (alarm && (!best || alarm->excess > best->excess)) best = alarm;
      }
      if (best && !pending_) begin_pending(*best);
    }

    std::vector<SegmentEvent> events;
    if (pending_ && t >= pending_->t_change + end_time_horizon(*pending_, config_.w_min)) finalize(events);
    return events;
  }

  std::vector<SegmentEvent> push_frames(std::span<const KeypointFrame> frames) {
    std::vector<SegmentEvent> events;
    for (const auto& f : frames) {
      auto more = push_frame(f);
      events.insert(events.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return events;
  }

  /// End of stream: resolves a pending alarm on the truncated window.
  std::vector<SegmentEvent> flush() {
    std::vector<SegmentEvent> events;
    if (pending_) finalize(events);
    return events;
  }

 private:
  struct Slot {
    KeypointFrame frame;
    FeatureSample sample;
    std::vector<double> signals;  ///< after smoothing; what the detectors see
  };

  /// Unusable keypoints take their last usable position, so trajectory fits
  /// never see NaN or low-confidence detections.
  void carry_positions(KeypointFrame& frame) {
    last_valid_.resize(frame.keypoints.size(), Point2{std::nan(""), std::nan("")});
    for (std::size_t k = 0; k < frame.keypoints.size(); ++k) {
      const bool ok = is_finite(frame.keypoints[k]) &&
                      (!frame.has_confidence() || frame.confidence[k] >= config_.features.confidence_floor);
      if (ok)
        last_valid_[k] = frame.keypoints[k];
      else
        frame.keypoints[k] = last_valid_[k];
    }
  }

  /// Before the first usable detection a keypoint has no position; the
  /// segment's first usable one is used instead.
  static FitResult fit_track(std::vector<Point2>& track, std::span<const double> times, const FitConfig& config) {
    const auto first = std::find_if(track.begin(), track.end(), [](Point2 p) { return is_finite(p); });
    if (first == track.end()) return {StationaryPrimitive{*track.begin()}, 0.0};
    std::fill(track.begin(), first, *first);
    return select_primitive(track, times, config);
  }

  void init_thresholds(const FeatureSample& first) {
    const auto& topo = extractor_.topology();
    double bone_h = 0.0;
    if (config_.threshold_bone) {
      bone_h = *config_.threshold_bone;
    } else if (auto torso = topo.torso_bone()) {
      bone_h = config_.threshold_bone_rel * first.lengths[*torso];
    } else if (!first.lengths.empty()) {
      double mean = 0.0;
      for (double v : first.lengths) mean += v;
      bone_h = config_.threshold_bone_rel * mean / static_cast<double>(first.lengths.size());
    }
    if (!topo.bones().empty() && !(bone_h > 0.0))
      throw Error(ErrorCode::Config, "bone threshold must be positive (degenerate first-frame torso?)");
    const double bone_drift = config_.drift * bone_h / config_.threshold_angle;
    for (std::size_t i = 0; i < detectors_.size(); ++i) {
      if (topo.is_angle_signal(i))
        detectors_[i].set_params({config_.threshold_angle, config_.drift});
      else
        detectors_[i].set_params({bone_h, bone_drift});
    }
  }

  void begin_pending(const ChangeAlarm& alarm) {
    const FrameIndex horizon = end_time_horizon(alarm, config_.w_min);
    const auto needed = static_cast<std::size_t>(alarm.t_change + horizon - alarm.t_start + 1);
    if (needed > config_.buffer_capacity)
      throw Error(ErrorCode::Capacity, "segment window of " + std::to_string(needed) + " frames exceeds buffer capacity " +
                                           std::to_string(config_.buffer_capacity));
    pending_ = alarm;
  }

  const Slot& slot_at(FrameIndex t) const {
    const FrameIndex first = buffer_.front().frame.t;
    if (t < first || t > buffer_.back().frame.t)
      throw Error(ErrorCode::Capacity, "frame " + std::to_string(t) + " is no longer buffered");
    return buffer_[static_cast<std::size_t>(t - first)];
  }

  void finalize(std::vector<SegmentEvent>& events) {
    const ChangeAlarm alarm = *pending_;
    pending_.reset();
    const FrameIndex now = buffer_.back().frame.t;
    const FrameIndex horizon = end_time_horizon(alarm, config_.w_min);
    const FrameIndex window_last = std::min(now, alarm.t_change + horizon);

    std::vector<double> window;
    for (FrameIndex t = alarm.t_change; t <= window_last; ++t) window.push_back(slot_at(t).signals[alarm.signal_id]);
    FrameIndex t_end = window_last;
    try {
      t_end = estimate_end_time(window, alarm, config_.w_min);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowTooShort) throw;
    }

    if (config_.refractory) {
      for (auto& d : detectors_) d.reset();
      refractory_until_ = t_end;
    }

    const FrameIndex length = t_end - alarm.t_start + 1;
    if (length < std::max<FrameIndex>(config_.min_segment_len, 4)) return;

    const std::size_t k_count = slot_at(alarm.t_start).frame.keypoints.size();
    std::vector<double> times;
    std::vector<FeatureSample> samples;
    std::vector<std::vector<Point2>> tracks(k_count);
    for (FrameIndex t = alarm.t_start; t <= t_end; ++t) {
      const Slot& s = slot_at(t);
      times.push_back(static_cast<double>(t));
      samples.push_back(s.sample);
      for (std::size_t k = 0; k < k_count; ++k) tracks[k].push_back(s.frame.keypoints[k]);
    }
    std::vector<FitResult> fits;
    fits.reserve(k_count);
    for (auto& track : tracks) fits.push_back(fit_track(track, times, config_.fit));

    SegmentEvent ev;
    ev.rep = summarize_segment(alarm.t_start, t_end, fits, samples);
    ev.rep.t_change = alarm.t_change;
    ev.rep.signal = extractor_.topology().signal_name(alarm.signal_id);
    if (auto torso = extractor_.topology().torso_bone()) {
      const double len = samples.front().lengths[*torso];
      if (len > 0.0) ev.rep.scale = len;
    }
    ev.horizon = horizon;
    ev.emitted_at = now;
    events.push_back(std::move(ev));
  }

  SegmenterConfig config_;
  FeatureExtractor extractor_;
  std::vector<MovingAverage> smoothers_;
  std::vector<CusumDetector> detectors_;
  std::deque<Slot> buffer_;
  std::vector<Point2> last_valid_;
  std::optional<ChangeAlarm> pending_;
  std::optional<FrameIndex> last_t_;
  FrameIndex refractory_until_ = -1;
};

}  // namespace actrep
