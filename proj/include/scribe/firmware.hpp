// Emulation of the pen machine's microcontroller program.
//
// The firmware is a single-owner state machine advanced one fixed tick at a
// time by firmware_tick(). It talks to the host only through protocol bytes
// and to the hardware only through SimulatedMachine.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include "scribe/machine_model.hpp"
#include "scribe/protocol.hpp"
#include "scribe/trace.hpp"

namespace scribe::firmware {

inline constexpr double kDefaultTickSeconds = 1e-3;

/// The physical machine the firmware drives: true carriage position measured
/// from the limit switches, switch wiring, and the pen-tip observation model.
class SimulatedMachine {
 public:
  explicit SimulatedMachine(MachineConfig config, StepPosition physical_start = {});

  const MachineConfig& config() const { return config_; }
  const StepPosition& physical() const { return physical_; }

  /// Where the firmware last zeroed its coordinates, in physical steps.
  const StepPosition& work_origin() const { return work_origin_; }
  void set_work_origin(const StepPosition& origin) { work_origin_ = origin; }

  void set_switch_connected(Axis axis, bool connected) { switch_connected_[index(axis)] = connected; }
  bool switch_triggered(Axis axis) const;

  void step(Axis axis, int direction) { physical_[axis] += direction; }

  double now() const { return now_s_; }
  void advance_clock(double dt) { now_s_ += dt; ++ticks_; }
  std::uint64_t ticks() const { return ticks_; }
  void reset_clock() { now_s_ = 0.0; ticks_ = 0; }

  PenSample sample() const;

 private:
  MachineConfig config_;
  FlexModel flex_;
  StepPosition physical_;
  StepPosition work_origin_{};
  std::array<bool, 3> switch_connected_{true, true, true};
  double now_s_ = 0.0;
  std::uint64_t ticks_ = 0;
};

/// Position along one axis for a rest-to-rest trapezoidal (or triangular)
/// velocity profile. An infinite acceleration gives a constant-speed move.
class TrapezoidProfile {
 public:
  TrapezoidProfile() = default;
  TrapezoidProfile(double distance, double max_speed, double accel);

  double distance() const { return distance_; }
  double duration() const { return duration_; }
  double peak_speed() const { return peak_speed_; }
  double position(double t) const;
  double velocity(double t) const;

  bool operator==(const TrapezoidProfile&) const = default;

 private:
  double distance_ = 0.0;
  double accel_ = 0.0;
  double peak_speed_ = 0.0;
  double ramp_time_ = 0.0;
  double ramp_distance_ = 0.0;
  double cruise_time_ = 0.0;
  double duration_ = 0.0;
};

struct AxisMotion {
  Steps delta_steps = 0;
  double speed_steps_s = 0.0;
  double accel_steps_s2 = 0.0;
  bool operator==(const AxisMotion&) const = default;
};

/// Straight-line move in step space. The dominant axis (largest |delta|)
/// runs at its top speed; every other axis is scaled by its distance ratio,
/// acceleration included, so all axes start and stop together.
struct MotionPlan {
  StepPosition start;
  StepPosition target;
  std::array<AxisMotion, 3> axes{};
  Axis dominant = Axis::X;
  TrapezoidProfile dominant_profile;

  const AxisMotion& axis(Axis a) const { return axes[index(a)]; }
  double duration() const { return dominant_profile.duration(); }
  bool operator==(const MotionPlan&) const = default;
};

MotionPlan plan_move(const StepPosition& current, const StepPosition& target, const MachineConfig& config);

enum class Mode : std::uint8_t { Idle, Homing, Moving, Fault };
enum class HomingPhase : std::uint8_t { Seeking, BackingOff };

const char* mode_name(Mode mode);

struct HomingProgress {
  std::size_t axis_index = 0;  // into kHomingOrder
  HomingPhase phase = HomingPhase::Seeking;
  Steps seek_steps = 0;
  Steps backoff_steps = 0;
  double step_budget = 0.0;
  bool operator==(const HomingProgress&) const = default;
};

inline constexpr std::array<Axis, 3> kHomingOrder = {Axis::Z, Axis::X, Axis::Y};

struct ActiveMove {
  MotionPlan plan;
  std::int64_t elapsed_ticks = 0;
  bool operator==(const ActiveMove&) const = default;
};

struct FirmwareState {
  Mode mode = Mode::Idle;
  bool homed = false;
  StepPosition position;  // logical, relative to the homed origin
  std::deque<StepPosition> queue;
  std::optional<HomingProgress> homing;
  std::optional<ActiveMove> active;
  protocol::LineFramer framer;
  std::string fault_reason;

  Axis homing_axis() const { return kHomingOrder[homing ? homing->axis_index : 0]; }
  std::size_t free_slots(const MachineConfig& config) const { return config.buffer_capacity - queue.size(); }

  bool operator==(const FirmwareState&) const = default;
};

struct CommandOutcome {
  FirmwareState state;
  std::optional<protocol::Feedback> feedback;
};

/// Dispatch one decoded command. Rejections leave the state untouched.
CommandOutcome handle_command(FirmwareState state, const protocol::Command& cmd, const MachineConfig& config);

bool within_bounds(const StepPosition& p, const MachineConfig& config);

/// Pops the queue head into the active slot when idle. Returns true if a move
/// was started.
bool start_next_move(FirmwareState& state, const MachineConfig& config);

/// Retires the active move (which must have reached its target) and returns
/// the completion report.
protocol::MoveDone finish_active_move(FirmwareState& state, const MachineConfig& config);

/// One deterministic scheduler step: ingest inbox bytes, dispatch commands,
/// advance homing or motion by one tick, start the next queued move. Returns
/// the bytes written to the host; pen samples for every tick that moved the
/// carriage are appended to `trace`.
std::string firmware_tick(FirmwareState& state, std::string_view inbox, SimulatedMachine& machine,
                          PenTrace& trace, double tick_s = kDefaultTickSeconds);

struct HomingResult {
  FirmwareState state;
  std::string outbox;
  std::uint64_t ticks = 0;
};

/// Runs the full homing procedure from whatever the machine's physical
/// position is. Ends Idle and homed, or in Fault on timeout.
HomingResult run_homing(FirmwareState state, SimulatedMachine& machine, double tick_s = kDefaultTickSeconds);

struct ExecutionResult {
  FirmwareState state;
  PenTrace trace;
  std::string outbox;
  std::uint64_t ticks = 0;
  Steps steps_emitted = 0;
};

/// Executes one plan to completion on the machine (the motion part of
/// firmware_tick, without protocol traffic).
ExecutionResult execute_plan(const MotionPlan& plan, FirmwareState state, SimulatedMachine& machine,
                             double tick_s = kDefaultTickSeconds);

}  // namespace scribe::firmware
