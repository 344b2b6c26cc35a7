#pragma once

#include <cmath>
#include <vector>

namespace scribe {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

using Polyline = std::vector<Point2>;

double polyline_length(const Polyline& line);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Points along the polyline at every `spacing` of arc length, always
/// including both ends. A single-point polyline is returned unchanged.
Polyline resample_by_arc_length(const Polyline& line, double spacing);

}  // namespace scribe
