#pragma once

#include <cmath>

namespace actrep {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator*(Point2 p, double s) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator/(Point2 p, double s) noexcept { return {p.x / s, p.y / s}; }
  friend constexpr bool operator==(Point2, Point2) noexcept = default;

  Point2& operator+=(Point2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
};

constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }
inline bool is_finite(Point2 p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

inline constexpr double kPi = 3.14159265358979323846;

constexpr double rad_to_deg(double r) noexcept { return r * 180.0 / kPi; }
constexpr double deg_to_rad(double d) noexcept { return d * kPi / 180.0; }

}  // namespace actrep
