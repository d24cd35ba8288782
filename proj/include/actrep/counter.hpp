#pragma once

// Online repetition counting by consecutive matching of segment
// representations against a buffer of recent segments.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "actrep/representation.hpp"

namespace actrep {

struct CountEvent {
  FrameIndex t = 0;  ///< t_end of the segment that completed the repetition
  int reps = 0;
  std::size_t period = 0;
  friend bool operator==(const CountEvent&, const CountEvent&) = default;
};

struct CounterConfig {
  MatchConfig match;
  std::size_t capacity = 64;
};

/// An open loop: `period` segments form one cycle, `matched` counts
/// consecutive period-aligned matches, reps = 1 + matched / period.
struct LoopHypothesis {
  std::size_t period = 0;
  std::vector<SegmentRepresentation> cycle;
  std::size_t matched = 0;
  int reps = 1;
  std::uint64_t first_id = 0;  ///< buffer id of the loop's first segment
};

class RepetitionCounter {
 public:
  explicit RepetitionCounter(CounterConfig config = {}) : config_(config) {}

  std::vector<CountEvent> push(const SegmentRepresentation& rep) {
    std::vector<CountEvent> events;
    if (loop_) {
      const auto& expected = loop_->cycle[loop_->matched % loop_->period];
      if (is_match(expected, rep, config_.match)) {
        ++loop_->matched;
        count_if_complete(rep, events);
      } else {
        close_loop();
        try_open(rep, events);
      }
    } else {
      try_open(rep, events);
    }
    append(rep);
    return events;
  }

  const std::optional<LoopHypothesis>& loop() const noexcept { return loop_; }
  std::size_t buffer_size() const noexcept { return buffer_.size(); }
  std::vector<SegmentRepresentation> buffer() const {
    std::vector<SegmentRepresentation> out;
    for (const auto& e : buffer_) out.push_back(e.rep);
    return out;
  }

 private:
  struct Entry {
    std::uint64_t id;
    SegmentRepresentation rep;
  };

  void try_open(const SegmentRepresentation& rep, std::vector<CountEvent>& events) {
    // Most recent first, so the shortest period wins.
    for (std::size_t back = 0; back < buffer_.size(); ++back) {
      const std::size_t idx = buffer_.size() - 1 - back;
      if (!is_match(buffer_[idx].rep, rep, config_.match)) continue;
      LoopHypothesis loop;
      loop.period = back + 1;
      for (std::size_t j = idx; j < buffer_.size(); ++j) loop.cycle.push_back(buffer_[j].rep);
      loop.matched = 1;
      loop.first_id = buffer_[idx].id;
      loop_ = std::move(loop);
      count_if_complete(rep, events);
      return;
    }
  }

  void count_if_complete(const SegmentRepresentation& rep, std::vector<CountEvent>& events) {
    if (loop_->matched % loop_->period != 0) return;
    ++loop_->reps;
    events.push_back({rep.t_end, loop_->reps, loop_->period});
  }

  /// Drops the closed loop's segments from the buffer.
  void close_loop() {
    const std::uint64_t first = loop_->first_id;
    std::erase_if(buffer_, [first](const Entry& e) { return e.id >= first; });
    loop_.reset();
  }

  void append(const SegmentRepresentation& rep) {
    buffer_.push_back({next_id_++, rep});
    while (buffer_.size() > config_.capacity) buffer_.pop_front();
  }

  CounterConfig config_;
  std::deque<Entry> buffer_;
  std::optional<LoopHypothesis> loop_;
  std::uint64_t next_id_ = 0;
};

}  // namespace actrep
