#include "scribe/machine_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scribe {

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
  }
  return "?";
}

MachineConfig::MachineConfig() {
  axes[index(Axis::Z)].travel_mm = 20.0;
}

double MachineConfig::steps_per_mm(Axis a) const {
  const auto& ax = axis(a);
  return static_cast<double>(ax.steps_per_rev) / ax.lead_pitch_mm;
}

Steps MachineConfig::travel_steps(Axis a) const {
  return mm_to_steps(axis(a).travel_mm, a, *this);
}

void MachineConfig::validate() const {
  for (Axis a : kAllAxes) {
    const auto& ax = axis(a);
    const std::string name = axis_name(a);
    if (ax.steps_per_rev < 1) throw std::invalid_argument(name + ".steps_per_rev must be >= 1");
    if (!(ax.lead_pitch_mm > 0.0) || !std::isfinite(ax.lead_pitch_mm))
      throw std::invalid_argument(name + ".lead_pitch_mm must be > 0");
    if (!(ax.travel_mm > 0.0) || !std::isfinite(ax.travel_mm))
      throw std::invalid_argument(name + ".travel_mm must be > 0");
    if (!(ax.max_step_rate > 0.0) || !std::isfinite(ax.max_step_rate))
      throw std::invalid_argument(name + ".max_step_rate must be > 0");
    // +inf is allowed: it means an instantaneous velocity change.
    if (!(ax.accel_steps_s2 > 0.0))
      throw std::invalid_argument(name + ".accel_steps_s2 must be > 0");
    if (ax.homing_backoff_steps < 0)
      throw std::invalid_argument(name + ".homing_backoff_steps must be >= 0");
    const double spm = steps_per_mm(a);
    if (!std::isfinite(spm) || !(spm > 0.0))
      throw std::invalid_argument(name + ": steps_per_mm must be finite and > 0");
  }
  if (buffer_capacity < 1) throw std::invalid_argument("buffer_capacity must be >= 1");
  if (!(flex_gain_mm_per_mm >= 0.0)) throw std::invalid_argument("flex_gain_mm_per_mm must be >= 0");
  if (!(flex_knee_mm >= 0.0)) throw std::invalid_argument("flex_knee_mm must be >= 0");
  if (!(paper_surface_z_mm > 0.0) || paper_surface_z_mm > axis(Axis::Z).travel_mm)
    throw std::invalid_argument("paper_surface_z_mm must lie within Z travel");
}

Steps StepPosition::operator[](Axis a) const {
  switch (a) {
    case Axis::X: return x;
    case Axis::Y: return y;
    case Axis::Z: return z;
  }
  return 0;
}

Steps& StepPosition::operator[](Axis a) {
  switch (a) {
    case Axis::X: return x;
    case Axis::Y: return y;
    case Axis::Z: break;
  }
  return z;
}

std::string to_string(const StepPosition& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) + ")";
}

Steps mm_to_steps(double mm, Axis axis, const MachineConfig& config) {
  const auto& ax = config.axis(axis);
  // Multiply before dividing so exact inputs stay exact.
  const double steps = mm * static_cast<double>(ax.steps_per_rev) / ax.lead_pitch_mm;
  return static_cast<Steps>(std::round(steps));
}

double steps_to_mm(Steps steps, Axis axis, const MachineConfig& config) {
  const auto& ax = config.axis(axis);
  return static_cast<double>(steps) * ax.lead_pitch_mm / static_cast<double>(ax.steps_per_rev);
}

bool limit_switch_active(const StepPosition& pos, Axis axis, const MachineConfig&) {
  return pos[axis] <= 0;
}

FlexModel FlexModel::from(const MachineConfig& config) {
  return FlexModel{config.flex_gain_mm_per_mm, config.flex_knee_mm, 0.0};
}

double flex_displacement(double x_mm, double /*y_mm*/, const FlexModel& model) {
  const double d = std::abs(x_mm - model.reference_x_mm);
  return model.gain * std::max(0.0, d - model.knee_mm);
}

}  // namespace scribe
