#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "actrep/counter.hpp"
#include "actrep/error.hpp"

namespace actrep {

/// max(0, 1 - |predicted - truth| / truth) * 100.
inline double percentage_accuracy(long predicted, long truth) {
  if (truth < 1) throw Error(ErrorCode::InvalidTruth, "true count must be at least 1");
  const double err = std::abs(static_cast<double>(predicted - truth)) / static_cast<double>(truth);
  return std::max(0.0, 1.0 - err) * 100.0;
}

/// Total repetitions reported by a count-event stream. Counts within a loop
/// rise by one per event; a value that does not rise marks a new loop, so
/// the total is the sum of each loop's final count.
inline long predicted_count(std::span<const CountEvent> events) {
  long total = 0;
  int last = 0;
  for (const auto& e : events) {
    if (e.reps <= last) total += last;
    last = e.reps;
  }
  return total + last;
}

}  // namespace actrep
