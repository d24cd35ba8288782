#pragma once

#include <span>
#include <variant>
#include <vector>

#include "actrep/counter.hpp"
#include "actrep/segmenter.hpp"

namespace actrep {

using Event = std::variant<SegmentEvent, CountEvent>;

struct PipelineConfig {
  SegmenterConfig segmenter;
  CounterConfig counter;
  bool counting = true;
};

/// Segmenter feeding the repetition counter. Each segment event is followed
/// by the count events it caused.
class Pipeline {
 public:
  Pipeline(SkeletonTopology topology, PipelineConfig config)
      : segmenter_(std::move(topology), config.segmenter), counter_(config.counter), counting_(config.counting) {}

  std::vector<Event> push_frame(const KeypointFrame& frame) { return route(segmenter_.push_frame(frame)); }

  std::vector<Event> push_frames(std::span<const KeypointFrame> frames) {
    std::vector<Event> out;
    for (const auto& f : frames) {
      auto more = push_frame(f);
      out.insert(out.end(), more.begin(), more.end());
    }
    return out;
  }

  std::vector<Event> finish() { return route(segmenter_.flush()); }

  const OnlineSegmenter& segmenter() const noexcept { return segmenter_; }
  const RepetitionCounter& counter() const noexcept { return counter_; }

 private:
  std::vector<Event> route(std::vector<SegmentEvent> segments) {
    std::vector<Event> out;
    for (auto& seg : segments) {
      std::vector<CountEvent> counts;
      if (counting_) counts = counter_.push(seg.rep);
      out.emplace_back(std::move(seg));
      out.insert(out.end(), counts.begin(), counts.end());
    }
    return out;
  }

  OnlineSegmenter segmenter_;
  RepetitionCounter counter_;
  bool counting_;
};

}  // namespace actrep
