#pragma once

// Online CuSum change detection and line-then-plateau end-time estimation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "actrep/error.hpp"

namespace actrep {

using FrameIndex = std::int64_t;

enum class Direction { Increasing, Decreasing };

inline const char* to_string(Direction d) noexcept { return d == Direction::Increasing ? "increasing" : "decreasing"; }

struct ChangeAlarm {
  std::size_t signal_id = 0;
  FrameIndex t_start = 0;
  FrameIndex t_change = 0;
  Direction direction = Direction::Increasing;
  double excess = 0.0;  ///< cumulative sum minus threshold at detection

  friend bool operator==(const ChangeAlarm&, const ChangeAlarm&) = default;
};

struct CusumParams {
  double threshold = 30.0;
  double drift = 0.0;
};

/// Two-sided CuSum on first differences. A sum that drops below zero is
/// clamped to zero and remembers the frame as the candidate change start.
class CusumDetector {
 public:
  explicit CusumDetector(CusumParams params = {}, std::size_t signal_id = 0)
      : params_(params), signal_id_(signal_id) {}

  std::optional<ChangeAlarm> update(double x, FrameIndex t) {
    if (!seeded_) {
      seeded_ = true;
      prev_x_ = x;
      t_pos_ = t_neg_ = t;
      return std::nullopt;
    }
    const double s = x - prev_x_;
    prev_x_ = x;
    g_pos_ = g_pos_ + s - params_.drift;
    g_neg_ = g_neg_ - s - params_.drift;
    if (g_pos_ < 0.0) {
      g_pos_ = 0.0;
      t_pos_ = t;
    }
    if (g_neg_ < 0.0) {
      g_neg_ = 0.0;
      t_neg_ = t;
    }
    if (g_pos_ > params_.threshold || g_neg_ > params_.threshold) {
      ChangeAlarm alarm;
      alarm.signal_id = signal_id_;
      alarm.t_change = t;
      if (g_pos_ > params_.threshold) {
        alarm.t_start = t_pos_;
        alarm.direction = Direction::Increasing;
        alarm.excess = g_pos_ - params_.threshold;
      } else {
        alarm.t_start = t_neg_;
        alarm.direction = Direction::Decreasing;
        alarm.excess = g_neg_ - params_.threshold;
      }
      g_pos_ = g_neg_ = 0.0;
      return alarm;
    }
    return std::nullopt;
  }

  /// Forget everything; the next update only seeds.
  void reset() noexcept {
    seeded_ = false;
    g_pos_ = g_neg_ = 0.0;
  }

  const CusumParams& params() const noexcept { return params_; }
  void set_params(CusumParams p) noexcept { params_ = p; }
  double g_pos() const noexcept { return g_pos_; }
  double g_neg() const noexcept { return g_neg_; }
  FrameIndex t_pos() const noexcept { return t_pos_; }
  FrameIndex t_neg() const noexcept { return t_neg_; }
  bool seeded() const noexcept { return seeded_; }

 private:
  CusumParams params_;
  std::size_t signal_id_;
  bool seeded_ = false;
  double prev_x_ = 0.0;
  double g_pos_ = 0.0;
  double g_neg_ = 0.0;
  FrameIndex t_pos_ = 0;
  FrameIndex t_neg_ = 0;
};

/// y = a*t + b for t < c, d = a*c + b for t >= c.
struct PiecewiseFit {
  double a = 0.0;
  double b = 0.0;
  FrameIndex c = 0;
  double d = 0.0;
  double sse = 0.0;

  double operator()(double t) const noexcept { return t < static_cast<double>(c) ? a * t + b : d; }
};

namespace detail {

/// Least-squares fit of y = a*min(t, c) + b for one candidate breakpoint.
inline PiecewiseFit fit_hinge(FrameIndex t0, std::span<const double> y, FrameIndex c) {
  const std::size_t n = y.size();
  const double cd = static_cast<double>(c);
  auto z_at = [&](std::size_t i) { return std::min(static_cast<double>(t0 + static_cast<FrameIndex>(i)), cd); };
  double z_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z_mean += z_at(i);
    y_mean += y[i];
  }
  z_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dz = z_at(i) - z_mean;
    szz += dz * dz;
    szy += dz * (y[i] - y_mean);
  }
  PiecewiseFit fit;
  fit.c = c;
  fit.a = szz > 0.0 ? szy / szz : 0.0;
  fit.b = y_mean - fit.a * z_mean;
  fit.d = fit.a * cd + fit.b;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.a * z_at(i) + fit.b);
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace detail

/// Exhaustive search over interior integer breakpoints of the window
/// t0 .. t0 + y.size() - 1; ties go to the smallest breakpoint.
inline PiecewiseFit fit_piecewise_linear(FrameIndex t0, std::span<const double> y) {
  if (y.size() < 4) throw Error(ErrorCode::WindowTooShort, "piecewise fit needs at least 4 samples");
  const FrameIndex last = t0 + static_cast<FrameIndex>(y.size()) - 1;
  PiecewiseFit best;
  best.sse = std::numeric_limits<double>::infinity();
  for (FrameIndex c = t0 + 1; c < last; ++c) {
    PiecewiseFit fit = detail::fit_hinge(t0, y, c);
    if (fit.sse < best.sse) best = fit;
  }
  return best;
}

/// Frames to wait after t_change: max(t_change - t_start, w_min).
inline FrameIndex end_time_horizon(const ChangeAlarm& alarm, FrameIndex w_min) noexcept {
  return std::max(alarm.t_change - alarm.t_start, w_min);
}

/// `from_change` holds the triggering signal from t_change onward, at most
/// W + 1 samples (fewer when the stream ended early).
inline FrameIndex estimate_end_time(std::span<const double> from_change, const ChangeAlarm& alarm, FrameIndex w_min) {
  const auto horizon = static_cast<std::size_t>(end_time_horizon(alarm, w_min));
  const auto window = from_change.first(std::min(from_change.size(), horizon + 1));
  return fit_piecewise_linear(alarm.t_change, window).c;
}

/// Trailing moving average; width 1 passes values through.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t width = 1) : width_(std::max<std::size_t>(width, 1)) {}

  double operator()(double x) {
    window_.push_back(x);
    if (window_.size() > width_) window_.pop_front();
    double sum = 0.0;
    for (double v : window_) sum += v;
    return sum / static_cast<double>(window_.size());
  }

  void reset() noexcept { window_.clear(); }

 private:
  std::size_t width_;
  std::deque<double> window_;
};

}  // namespace actrep
