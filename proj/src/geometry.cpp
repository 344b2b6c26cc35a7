#include "scribe/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace scribe {

double polyline_length(const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) total += distance(line[i - 1], line[i]);
  return total;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  if (len2 == 0.0) return distance(p, a);
  const Point2 ap = p - a;
  const double t = std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

Polyline resample_by_arc_length(const Polyline& line, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("resample spacing must be > 0");
  if (line.size() <= 1) return line;

  Polyline out;
  out.push_back(line.front());
  double next = spacing;  // arc length of the next sample
  double walked = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Point2 a = line[i - 1];
    const Point2 b = line[i];
    const double seg = distance(a, b);
    while (seg > 0.0 && next <= walked + seg) {
      out.push_back(a + (b - a) * ((next - walked) / seg));
      next += spacing;
    }
    walked += seg;
  }
  if (out.back() != line.back()) out.push_back(line.back());
  return out;
}

}  // namespace scribe
