// Text -> lines -> strokes -> machine steps -> pen-annotated target queue.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/config.hpp"
#include "scribe/hostctl/strokes.hpp"
#include "scribe/machine_model.hpp"

namespace scribe::hostctl {

struct StepPoint {
  Steps x = 0;
  Steps y = 0;
  bool operator==(const StepPoint&) const = default;
};

/// A stroke after scaling and offsetting into machine steps. Consecutive
/// points that quantize to the same step are merged, so a very short stroke
/// may shrink to a single point (a pen dab).
struct StepStroke {
  std::vector<StepPoint> points;
  bool operator==(const StepStroke&) const = default;
};

enum class PenState : std::uint8_t { Travel, Draw };

struct TargetPoint {
  Steps x = 0;
  Steps y = 0;
  Steps z = 0;
  PenState pen = PenState::Travel;
  bool operator==(const TargetPoint&) const = default;
};

class OutOfWorkArea : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Host-side model of the carriage flex, used to pre-distort Z.
struct Compensation {
  bool enabled = true;
  double gain = 0.0;
  double knee_mm = 0.0;

  static Compensation from(const Config& config);
};

/// Lays out each line below the previous one (paper frame, millimetres,
/// y down the page).
std::vector<Stroke> layout_lines(const std::vector<std::string>& lines, const StrokeGenerator& gen,
                                 const HostConfig& host, std::vector<std::string>* warnings = nullptr);

std::vector<StepStroke> transform_coordinates(const std::vector<Stroke>& strokes, const MachineConfig& config);

/// Paper-frame millimetres to machine-frame millimetres (no quantization).
Point2 paper_to_machine_mm(Point2 p, const MachineConfig& config);

/// Extra downward Z steps at a homed XY so that the flexed pen still reaches
/// the commanded depth: mm_to_steps_z(k * max(0, d - d0)).
Steps z_compensation(Steps x_steps, Steps y_steps, const MachineConfig& config, const Compensation& comp);

Steps lifted_z(const MachineConfig& config, const HostConfig& host);
Steps writing_z(const MachineConfig& config, const HostConfig& host);

/// For every stroke: lifted approach at its first point, the draw points,
/// lifted exit at its last point.
std::vector<TargetPoint> insert_pen_transitions(const std::vector<StepStroke>& strokes, const MachineConfig& config,
                                                const HostConfig& host, const Compensation& comp);

struct JobPlan {
  std::vector<std::string> lines;
  std::vector<Stroke> paper_strokes;  // paper frame, mm
  std::vector<Polyline> reference;    // machine frame, mm: what the pen should draw
  std::vector<StepStroke> step_strokes;
  std::vector<TargetPoint> targets;
  std::vector<std::string> warnings;
};

/// The whole front-end pipeline. Deterministic in (text, generator, config).
JobPlan plan_job(std::string_view text, const StrokeGenerator& gen, const Config& config);

}  // namespace scribe::hostctl
