// Measurements over simulated pen traces, plus the bill-of-materials model.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/geometry.hpp"
#include "scribe/hostctl/pipeline.hpp"
#include "scribe/trace.hpp"

namespace scribe::evaluation {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoDrawSegments : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kResampleSpacingMm = 0.05;

/// Maximal runs of consecutive pen-down samples, as XY polylines.
std::vector<Polyline> pen_down_paths(const PenTrace& trace);

/// Directed Hausdorff distance from the trace's pen-down path to the
/// reference, both resampled by arc length at `spacing`: the largest distance
/// from any trace sample to the nearest point of the reference.
double max_deviation(const std::vector<Polyline>& reference, const PenTrace& trace,
                     double spacing = kResampleSpacingMm);

/// Per-point directed distances, for callers that need more than the maximum.
struct DeviationSample {
  Point2 at;
  double distance = 0.0;
};
std::vector<DeviationSample> deviation_profile(const std::vector<Polyline>& reference, const PenTrace& trace,
                                               double spacing = kResampleSpacingMm);

/// Pen-down XY path length over pen-down elapsed time, in mm/min.
double writing_speed(const PenTrace& trace);

/// Largest |actual - intended| pen depth over the draw targets, where
/// `completions[i]` is the pen sample taken when target i finished.
double max_depth_error(const std::vector<hostctl::TargetPoint>& targets, const std::vector<PenSample>& completions,
                       double writing_depth_mm);

struct SvgOptions {
  double hotspot_threshold_mm = 0.1;
  std::size_t max_hotspots = 50;
};

/// Overlay of reference (blue) and pen-down trace (red). One user unit is
/// 0.1 mm. Output bytes depend only on the inputs.
std::string render_svg(const std::vector<Polyline>& reference, const PenTrace& trace, const SvgOptions& options = {});

/// Exact money in cents.
struct Cents {
  std::int64_t value = 0;
  std::string str() const;  // "56.09"
  static Cents parse(std::string_view text);
  auto operator<=>(const Cents&) const = default;
};

struct BomItem {
  std::string name;
  std::int64_t count = 0;
  Cents total_cost;
  bool operator==(const BomItem&) const = default;
};

/// CSV with header "Component,Count,Total Cost (USD)"; '#' starts a comment.
std::vector<BomItem> parse_bom(std::string_view text);
std::vector<BomItem> load_bom(const std::string& path);
Cents bom_total(const std::vector<BomItem>& items);
std::string format_bom_table(const std::vector<BomItem>& items);

}  // namespace scribe::evaluation
