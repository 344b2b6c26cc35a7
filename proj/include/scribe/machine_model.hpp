// Parameterized physical model of the three-axis lead-screw pen machine.
//
// Axis conventions: X and Y span the writing surface, Z is the pen axis with
// positive steps moving the pen *down* toward the paper. Every axis has its
// limit switch at coordinate 0.

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace scribe {

using Steps = std::int64_t;

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::X, Axis::Y, Axis::Z};

constexpr std::size_t index(Axis axis) { return static_cast<std::size_t>(axis); }
const char* axis_name(Axis axis);

/// Per-axis mechanical and electrical parameters.
struct AxisConfig {
  Steps steps_per_rev = 2048;
  double lead_pitch_mm = 8.0;
  double travel_mm = 200.0;
  double max_step_rate = 1024.0;    // steps/s, 4 mm/s at the default pitch
  double accel_steps_s2 = 20000.0;  // steps/s^2
  Steps homing_backoff_steps = 16;

  bool operator==(const AxisConfig&) const = default;
};

struct MachineConfig {
  std::array<AxisConfig, 3> axes{};

  // Flex of the pen carriage, growing with distance from the Z lead screws
  // (mounted along the X = 0 edge).
  double flex_gain_mm_per_mm = 0.005;
  double flex_knee_mm = 50.0;

  std::size_t buffer_capacity = 8;
  std::array<Steps, 2> xy_offset_steps{2560, 2560};

  // Z coordinate (mm below the homed origin) at which a rigid pen first
  // touches the paper.
  double paper_surface_z_mm = 10.0;

  MachineConfig();

  const AxisConfig& axis(Axis a) const { return axes[index(a)]; }
  AxisConfig& axis(Axis a) { return axes[index(a)]; }

  double steps_per_mm(Axis a) const;
  Steps travel_steps(Axis a) const;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  bool operator==(const MachineConfig&) const = default;
};

struct StepPosition {
  Steps x = 0;
  Steps y = 0;
  Steps z = 0;

  Steps operator[](Axis a) const;
  Steps& operator[](Axis a);

  bool operator==(const StepPosition&) const = default;
};

std::string to_string(const StepPosition& p);

/// round(mm * steps_per_rev / lead_pitch_mm), ties away from zero.
Steps mm_to_steps(double mm, Axis axis, const MachineConfig& config);
double steps_to_mm(Steps steps, Axis axis, const MachineConfig& config);

/// The switch sits at the origin; it reads active at or past it.
bool limit_switch_active(const StepPosition& pos, Axis axis, const MachineConfig& config);

struct FlexModel {
  double gain = 0.0;     // k, mm of pen lift per mm of distance past the knee
  double knee_mm = 0.0;  // d0
  double reference_x_mm = 0.0;

  static FlexModel from(const MachineConfig& config);
};

/// k * max(0, d - d0), where d is the horizontal distance from the Z lead
/// screws. The carriage deflects away from the paper by this much, so a pen
/// commanded to depth h only reaches h - flex.
double flex_displacement(double x_mm, double y_mm, const FlexModel& model);

}  // namespace scribe
