#include "scribe/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace scribe::evaluation {

std::vector<Polyline> pen_down_paths(const PenTrace& trace) {
  std::vector<Polyline> out;
  bool in_run = false;
  for (const auto& s : trace) {
    if (!s.pen_down) {
      in_run = false;
      continue;
    }
    if (!in_run) out.emplace_back();
    in_run = true;
    out.back().push_back({s.x_mm, s.y_mm});
  }
  return out;
}

namespace {

// Uniform grid over short segments for nearest-distance queries.
class SegmentGrid {
 public:
  SegmentGrid(const std::vector<Polyline>& lines, double cell) : cell_(cell) {
    for (const auto& line : lines) {
      if (line.size() == 1) segments_.push_back({line[0], line[0]});
      for (std::size_t i = 1; i < line.size(); ++i) segments_.push_back({line[i - 1], line[i]});
    }
    if (segments_.empty()) return;
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = max_x;
    min_x_ = min_y_ = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : segments_) {
      min_x_ = std::min({min_x_, a.x, b.x});
      min_y_ = std::min({min_y_, a.y, b.y});
      max_x = std::max({max_x, a.x, b.x});
      max_y = std::max({max_y, a.y, b.y});
    }
    nx_ = static_cast<long>(std::floor((max_x - min_x_) / cell_)) + 1;
    ny_ = static_cast<long>(std::floor((max_y - min_y_) / cell_)) + 1;
    cells_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      const auto& [a, b] = segments_[s];
      const long i0 = cx(std::min(a.x, b.x)), i1 = cx(std::max(a.x, b.x));
      const long j0 = cy(std::min(a.y, b.y)), j1 = cy(std::max(a.y, b.y));
      for (long i = i0; i <= i1; ++i)
        for (long j = j0; j <= j1; ++j) cells_[static_cast<std::size_t>(j * nx_ + i)].push_back(s);
    }
  }

  bool empty() const { return segments_.empty(); }

  double nearest(Point2 p) const {
    const long pi = static_cast<long>(std::floor((p.x - min_x_) / cell_));
    const long pj = static_cast<long>(std::floor((p.y - min_y_) / cell_));
    const long max_ring = std::max({std::abs(pi), std::abs(pi - (nx_ - 1)), std::abs(pj), std::abs(pj - (ny_ - 1))});
    double best = std::numeric_limits<double>::infinity();
    for (long r = 0; r <= max_ring; ++r) {
      for (long i = pi - r; i <= pi + r; ++i) {
        if (i < 0 || i >= nx_) continue;
        const bool edge_col = i == pi - r || i == pi + r;
        for (long j = pj - r; j <= pj + r; j += (edge_col ? 1 : 2 * r)) {
          if (j >= 0 && j < ny_) {
            for (const auto s : cells_[static_cast<std::size_t>(j * nx_ + i)]) {
              best = std::min(best, point_segment_distance(p, segments_[s].first, segments_[s].second));
            }
          }
          if (r == 0) break;
        }
      }
      // Any cell outside ring r is at least r cells away from p.
      if (best <= static_cast<double>(r) * cell_) break;
    }
    return best;
  }

 private:
  long cx(double x) const { return std::clamp(static_cast<long>(std::floor((x - min_x_) / cell_)), 0L, nx_ - 1); }
  long cy(double y) const { return std::clamp(static_cast<long>(std::floor((y - min_y_) / cell_)), 0L, ny_ - 1); }

  double cell_;
  std::vector<std::pair<Point2, Point2>> segments_;
  double min_x_ = 0.0, min_y_ = 0.0;
  long nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::size_t>> cells_;
};

std::vector<Polyline> resample_all(const std::vector<Polyline>& lines, double spacing) {
  std::vector<Polyline> out;
  out.reserve(lines.size());
  for (const auto& l : lines) {
    if (!l.empty()) out.push_back(resample_by_arc_length(l, spacing));
  }
  return out;
}

}  // namespace

std::vector<DeviationSample> deviation_profile(const std::vector<Polyline>& reference, const PenTrace& trace,
                                               double spacing) {
  const auto ref = resample_all(reference, spacing);
  const auto drawn = resample_all(pen_down_paths(trace), spacing);
  const SegmentGrid grid(ref, 0.5);
  if (grid.empty()) throw EmptyInput("max_deviation: empty reference");
  if (drawn.empty()) throw EmptyInput("max_deviation: trace has no pen-down samples");

  std::vector<DeviationSample> out;
  for (const auto& path : drawn) {
    for (const Point2 p : path) out.push_back({p, grid.nearest(p)});
  }
  return out;
}

double max_deviation(const std::vector<Polyline>& reference, const PenTrace& trace, double spacing) {
  double worst = 0.0;
  for (const auto& d : deviation_profile(reference, trace, spacing)) worst = std::max(worst, d.distance);
  return worst;
}

double writing_speed(const PenTrace& trace) {
  double length = 0.0;
  double elapsed = 0.0;
  std::size_t down = 0;
  bool paired = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!trace[i].pen_down) continue;
    ++down;
    if (i > 0 && trace[i - 1].pen_down) {
      length += std::hypot(trace[i].x_mm - trace[i - 1].x_mm, trace[i].y_mm - trace[i - 1].y_mm);
      elapsed += trace[i].t - trace[i - 1].t;
      paired = true;
    }
  }
  if (down < 2 || !paired || !(elapsed > 0.0)) throw NoDrawSegments("writing_speed: no pen-down segments");
  return length / elapsed * 60.0;
}

double max_depth_error(const std::vector<hostctl::TargetPoint>& targets, const std::vector<PenSample>& completions,
                       double writing_depth_mm) {
  double worst = 0.0;
  const std::size_t n = std::min(targets.size(), completions.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i].pen != hostctl::PenState::Draw) continue;
    const double depth = -completions[i].z_mm;
    worst = std::max(worst, std::abs(depth - writing_depth_mm));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

void simplify_range(const Polyline& in, std::size_t lo, std::size_t hi, double tol, std::vector<bool>& keep) {
  // Iterative Douglas-Peucker to stay off the call stack on long traces.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{lo, hi}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = point_segment_distance(in[i], in[a], in[b]);
      if (d > worst) {
        worst = d;
        at = i;
      }
    }
    if (worst > tol) {
      keep[at] = true;
      stack.push_back({a, at});
      stack.push_back({at, b});
    }
  }
}

Polyline simplify(const Polyline& in, double tol) {
  if (in.size() <= 2) return in;
  std::vector<bool> keep(in.size(), false);
  keep.front() = keep.back() = true;
  simplify_range(in, 0, in.size() - 1, tol, keep);
  Polyline out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (keep[i]) out.push_back(in[i]);
  return out;
}

std::string path_data(const Polyline& line) {
  std::string d;
  for (std::size_t i = 0; i < line.size(); ++i) {
    d += i == 0 ? "M" : " L";
    d += num(line[i].x * 10.0) + "," + num(line[i].y * 10.0);
  }
  if (line.size() == 1) d += " L" + num(line[0].x * 10.0) + "," + num(line[0].y * 10.0);
  return d;
}

}  // namespace

std::string render_svg(const std::vector<Polyline>& reference, const PenTrace& trace, const SvgOptions& options) {
  constexpr double kTolMm = 0.005;
  std::vector<Polyline> ref;
  for (const auto& l : reference)
    if (!l.empty()) ref.push_back(simplify(l, kTolMm));
  std::vector<Polyline> drawn;
  for (const auto& l : pen_down_paths(trace)) drawn.push_back(simplify(l, kTolMm));

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto* set : {&ref, &drawn}) {
    for (const auto& l : *set) {
      for (const Point2 p : l) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
      }
    }
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (ref.empty() && drawn.empty()) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"0mm\" height=\"0mm\" "
           "viewBox=\"0 0 0 0\">\n</svg>\n";
    return out.str();
  }

  constexpr double kMarginMm = 2.0;
  const double x0 = (min_x - kMarginMm) * 10.0, y0 = (min_y - kMarginMm) * 10.0;
  const double w = (max_x - min_x + 2 * kMarginMm) * 10.0, h = (max_y - min_y + 2 * kMarginMm) * 10.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w / 10.0) << "mm\" height=\""
      << num(h / 10.0) << "mm\" viewBox=\"" << num(x0) << " " << num(y0) << " " << num(w) << " " << num(h)
      << "\">\n";
  out << "<g id=\"reference\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"3\" stroke-linecap=\"round\" "
         "stroke-linejoin=\"round\">\n";
  for (const auto& l : ref) out << "<path d=\"" << path_data(l) << "\"/>\n";
  out << "</g>\n";
  out << "<g id=\"trace\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-linecap=\"round\" "
         "stroke-linejoin=\"round\">\n";
  for (const auto& l : drawn) out << "<path d=\"" << path_data(l) << "\"/>\n";
  out << "</g>\n";

  if (!ref.empty() && !drawn.empty()) {
    auto profile = deviation_profile(reference, trace);
    std::vector<std::size_t> order(profile.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return profile[a].distance > profile[b].distance; });
    std::vector<DeviationSample> spots;
    for (const std::size_t i : order) {
      if (spots.size() >= options.max_hotspots) break;
      const auto& s = profile[i];
      if (!spots.empty() && s.distance < options.hotspot_threshold_mm) break;
      const bool crowded = std::any_of(spots.begin(), spots.end(),
                                       [&](const DeviationSample& o) { return distance(o.at, s.at) < 1.0; });
      if (!crowded) spots.push_back(s);
    }
    out << "<g id=\"deviation\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1\">\n";
    for (const auto& s : spots) {
      const double r = std::max(5.0, s.distance * 10.0 * 2.0);
      out << "<circle cx=\"" << num(s.at.x * 10.0) << "\" cy=\"" << num(s.at.y * 10.0) << "\" r=\"" << num(r)
          << "\"/>\n";
    }
    const auto& worst = spots.front();
    char label[64];
    std::snprintf(label, sizeof label, "max %.3f mm", worst.distance);
    out << "<text x=\"" << num(worst.at.x * 10.0 + 6.0) << "\" y=\"" << num(worst.at.y * 10.0 - 6.0)
        << "\" font-size=\"20\" fill=\"#2ca02c\" stroke=\"none\">" << label << "</text>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Bill of materials

std::string Cents::str() const {
  const std::int64_t whole = value / 100;
  const std::int64_t frac = value % 100;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(whole), static_cast<long long>(frac));
  return buf;
}

Cents Cents::parse(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("bad money amount '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  const auto dot = text.find('.');
  const auto whole = text.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2 || (dot != std::string_view::npos && frac.empty())) throw bad();
  std::int64_t cents = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw bad();
    cents = cents * 10 + (c - '0');
    if (cents > std::numeric_limits<std::int64_t>::max() / 1000) throw bad();
  }
  std::int64_t f = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const char c = i < frac.size() ? frac[i] : '0';
    if (c < '0' || c > '9') throw bad();
    f = f * 10 + (c - '0');
  }
  return Cents{cents * 100 + f};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<BomItem> parse_bom(std::string_view text) {
  std::vector<BomItem> items;
  std::istringstream in{std::string(text)};
  std::string raw;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "Component,Count,Total Cost (USD)")
        throw std::invalid_argument("BOM line " + std::to_string(line_no) + ": expected header");
      header_seen = true;
      continue;
    }
    const auto last = line.rfind(',');
    const auto mid = last == std::string::npos ? std::string::npos : line.rfind(',', last - 1);
    if (mid == std::string::npos || last == 0)
      throw std::invalid_argument("BOM line " + std::to_string(line_no) + ": expected 3 columns");
    BomItem item;
    item.name = trim(std::string_view(line).substr(0, mid));
    const auto count = trim(std::string_view(line).substr(mid + 1, last - mid - 1));
    try {
      std::size_t used = 0;
      item.count = std::stoll(count, &used);
      if (used != count.size() || item.count < 1) throw std::invalid_argument("count");
      item.total_cost = Cents::parse(trim(std::string_view(line).substr(last + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("BOM line " + std::to_string(line_no) + ": bad count or cost");
    }
    if (item.name.empty()) throw std::invalid_argument("BOM line " + std::to_string(line_no) + ": empty component");
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<BomItem> load_bom(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open BOM file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_bom(buf.str());
}

Cents bom_total(const std::vector<BomItem>& items) {
  Cents total;
  for (const auto& i : items) total.value += i.total_cost.value;
  return total;
}

std::string format_bom_table(const std::vector<BomItem>& items) {
  std::size_t width = 9;
  for (const auto& i : items) width = std::max(width, i.name.size());
  std::ostringstream out;
  char row[256];
  std::snprintf(row, sizeof row, "%-*s %6s %12s\n", static_cast<int>(width), "Component", "Count", "Total (USD)");
  out << row;
  for (const auto& i : items) {
    std::snprintf(row, sizeof row, "%-*s %6lld %12s\n", static_cast<int>(width), i.name.c_str(),
                  static_cast<long long>(i.count), i.total_cost.str().c_str());
    out << row;
  }
  std::snprintf(row, sizeof row, "%-*s %6s %12s\n", static_cast<int>(width), "Total", "", bom_total(items).str().c_str());
  out << row;
  return out.str();
}

}  // namespace scribe::evaluation
