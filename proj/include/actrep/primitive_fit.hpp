#pragma once

// Symbolic motion primitives (stationary point, line, circle) fitted to one
// keypoint trajectory. The temporal profile is a quadratic over normalized
// time tau in [0, 1], placed on the shape's own 1-D parameter: arc length for
// lines and unwrapped angle for circles, so evaluated points always lie on
// the fitted shape.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "actrep/error.hpp"
#include "actrep/geometry.hpp"

namespace actrep {

struct Quadratic {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double operator()(double tau) const noexcept { return (a2 * tau + a1) * tau + a0; }
  friend bool operator==(const Quadratic&, const Quadratic&) = default;
};

struct StationaryPrimitive {
  Point2 mean;
  friend bool operator==(const StationaryPrimitive&, const StationaryPrimitive&) = default;
};

struct LinePrimitive {
  Point2 base;
  Point2 direction;  ///< unit norm
  Quadratic arc;     ///< signed distance from base along direction
  friend bool operator==(const LinePrimitive&, const LinePrimitive&) = default;
};

struct CirclePrimitive {
  Point2 center;
  double radius = 0.0;
  Quadratic angle;  ///< radians, unwrapped
  friend bool operator==(const CirclePrimitive&, const CirclePrimitive&) = default;
};

enum class PrimitiveKind { Stationary, Line, Circle };

inline constexpr std::string_view to_string(PrimitiveKind k) noexcept {
  switch (k) {
    case PrimitiveKind::Stationary: return "stationary";
    case PrimitiveKind::Line: return "line";
    case PrimitiveKind::Circle: return "circle";
  }
  return "?";
}

using Primitive = std::variant<StationaryPrimitive, LinePrimitive, CirclePrimitive>;

inline PrimitiveKind kind_of(const Primitive& p) noexcept { return static_cast<PrimitiveKind>(p.index()); }

struct FitResult {
  Primitive primitive;
  double rms_residual = 0.0;

  PrimitiveKind kind() const noexcept { return kind_of(primitive); }
};

struct FitConfig {
  /// Reference scale for the derived defaults below; sqrt(2) for coordinates
  /// normalized to the unit square.
  double frame_diagonal = std::sqrt(2.0);
  std::optional<double> stationary_eps;  ///< default 0.5% of frame_diagonal
  std::optional<double> max_radius;      ///< default 10x frame_diagonal
  double model_margin = 0.05;

  double effective_stationary_eps() const { return stationary_eps.value_or(0.005 * frame_diagonal); }
  double effective_max_radius() const { return max_radius.value_or(10.0 * frame_diagonal); }
};

/// Least-squares a2*tau^2 + a1*tau + a0.
inline Quadratic fit_quadratic(std::span<const double> taus, std::span<const double> values) {
  if (taus.size() != values.size()) throw Error(ErrorCode::SingularFit, "tau/value length mismatch");
  std::vector<double> distinct(taus.begin(), taus.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw Error(ErrorCode::SingularFit, "quadratic fit needs 3 distinct abscissae");

  const auto n = static_cast<Eigen::Index>(taus.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = taus[static_cast<std::size_t>(i)];
    design(i, 0) = tau * tau;
    design(i, 1) = tau;
    design(i, 2) = 1.0;
    rhs(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1), coef(2)};
}

/// Maps frame times onto [0, 1] relative to the first and last sample.
inline std::vector<double> normalized_times(std::span<const double> times) {
  std::vector<double> taus(times.size(), 0.0);
  if (times.empty()) return taus;
  const double t0 = times.front();
  const double span = times.back() - t0;
  for (std::size_t i = 0; i < times.size(); ++i) taus[i] = span > 0.0 ? (times[i] - t0) / span : 0.0;
  return taus;
}

inline Point2 centroid(std::span<const Point2> points) {
  Point2 sum;
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

inline std::optional<FitResult> fit_stationary(std::span<const Point2> points, double eps) {
  if (points.empty()) return std::nullopt;
  const Point2 mean = centroid(points);
  double ss = 0.0;
  for (const auto& p : points) {
    const Point2 d = p - mean;
    ss += dot(d, d);
  }
  const double rms = std::sqrt(ss / static_cast<double>(points.size()));
  if (rms < eps) return FitResult{StationaryPrimitive{mean}, rms};
  return std::nullopt;
}

namespace detail {

inline void check_times(std::span<const Point2> points, std::span<const double> times, std::size_t min_points) {
  if (points.size() != times.size()) throw Error(ErrorCode::DegenerateInput, "points/times length mismatch");
  if (points.size() < min_points)
    throw Error(ErrorCode::DegenerateInput, "need at least " + std::to_string(min_points) + " points");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error(ErrorCode::DegenerateInput, "times must be strictly increasing");
}

}  // namespace detail

/// Orthogonal-regression line through the centroid along the principal axis.
inline FitResult fit_line(std::span<const Point2> points, std::span<const double> times) {
  detail::check_times(points, times, 3);
  const Point2 mean = centroid(points);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const Point2 d = p - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  if (sxx + syy == 0.0) throw Error(ErrorCode::DegenerateInput, "all points coincide");

  // Principal axis of the 2x2 scatter matrix.
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  Point2 dir{std::cos(angle), std::sin(angle)};

  std::vector<double> s(points.size());
  double perp_ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 d = points[i] - mean;
    s[i] = dot(d, dir);
    const double off = cross(dir, d);
    perp_ss += off * off;
  }
  if (s.back() < s.front()) {
    dir = -1.0 * dir;
    for (auto& v : s) v = -v;
  }
  const auto taus = normalized_times(times);
  LinePrimitive line{mean, dir, fit_quadratic(taus, s)};
  return {line, std::sqrt(perp_ss / static_cast<double>(points.size()))};
}

/// Consecutive differences brought into (-pi, pi] by whole turns.
inline std::vector<double> unwrap_angles(std::span<const double> seq) {
  std::vector<double> out(seq.begin(), seq.end());
  constexpr double two_pi = 2.0 * kPi;
  for (std::size_t i = 1; i < out.size(); ++i) {
    double d = seq[i] - seq[i - 1];
    d -= two_pi * std::ceil((d - kPi) / two_pi);  // now in (-pi, pi]
    out[i] = out[i - 1] + d;
  }
  return out;
}

/// Kasa algebraic circle fit: minimizes sum (|p - c|^2 - r^2)^2 with a single
/// linear least-squares solve in centered, scaled coordinates.
inline FitResult fit_circle(std::span<const Point2> points, std::span<const double> times) {
  detail::check_times(points, times, 4);
  const Point2 mean = centroid(points);
  double scale = 0.0;
  for (const auto& p : points) scale += dot(p - mean, p - mean);
  scale = std::sqrt(scale / static_cast<double>(points.size()));
  if (scale == 0.0) throw Error(ErrorCode::SingularFit, "all points coincide");

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 q = (points[static_cast<std::size_t>(i)] - mean) / scale;
    design(i, 0) = q.x;
    design(i, 1) = q.y;
    design(i, 2) = 1.0;
    rhs(i) = -(q.x * q.x + q.y * q.y);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw Error(ErrorCode::SingularFit, "points are collinear");
  const Eigen::Vector3d sol = qr.solve(rhs);  // x^2 + y^2 + D x + E y + F = 0
  const double cx = -0.5 * sol(0);
  const double cy = -0.5 * sol(1);
  const double r2 = cx * cx + cy * cy - sol(2);
  if (!(r2 > 0.0) || !std::isfinite(r2)) throw Error(ErrorCode::SingularFit, "no real circle");

  const Point2 center = mean + scale * Point2{cx, cy};
  const double radius = scale * std::sqrt(r2);

  std::vector<double> theta(points.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 d = points[i] - center;
    theta[i] = std::atan2(d.y, d.x);
    const double r = norm(d) - radius;
    ss += r * r;
  }
  const auto unwrapped = unwrap_angles(theta);
  const auto taus = normalized_times(times);
  CirclePrimitive circle{center, radius, fit_quadratic(taus, unwrapped)};
  return {circle, std::sqrt(ss / static_cast<double>(points.size()))};
}

/// Stationary when the points barely move; otherwise the better of line and
/// circle, with near-ties (relative margin) resolved in favour of the line.
inline FitResult select_primitive(std::span<const Point2> points, std::span<const double> times,
                                  const FitConfig& config = {}) {
  if (points.size() < 4) throw Error(ErrorCode::DegenerateInput, "primitive selection needs at least 4 points");
  if (auto stationary = fit_stationary(points, config.effective_stationary_eps())) return *stationary;

  FitResult line = fit_line(points, times);
  std::optional<FitResult> circle;
  try {
    circle = fit_circle(points, times);
    if (std::get<CirclePrimitive>(circle->primitive).radius > config.effective_max_radius()) circle.reset();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularFit) throw;
  }
  if (circle && circle->rms_residual < (1.0 - config.model_margin) * line.rms_residual) return *circle;
  return line;
}

inline Point2 eval_primitive(const Primitive& prim, double tau) {
  return std::visit(
      [tau](const auto& p) -> Point2 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StationaryPrimitive>) {
          return p.mean;
        } else if constexpr (std::is_same_v<T, LinePrimitive>) {
          return p.base + p.arc(tau) * p.direction;
        } else {
          const double th = p.angle(tau);
          return p.center + p.radius * Point2{std::cos(th), std::sin(th)};
        }
      },
      prim);
}

}  // namespace actrep
