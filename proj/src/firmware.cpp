#include "scribe/firmware.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace scribe::firmware {

namespace proto = scribe::protocol;

// ---------------------------------------------------------------------------
// SimulatedMachine

SimulatedMachine::SimulatedMachine(MachineConfig config, StepPosition physical_start)
    : config_(std::move(config)), flex_(FlexModel::from(config_)), physical_(physical_start) {
  config_.validate();
}

bool SimulatedMachine::switch_triggered(Axis axis) const {
  return switch_connected_[index(axis)] && limit_switch_active(physical_, axis, config_);
}

PenSample SimulatedMachine::sample() const {
  const double x = steps_to_mm(physical_.x - work_origin_.x, Axis::X, config_);
  const double y = steps_to_mm(physical_.y - work_origin_.y, Axis::Y, config_);
  const double carriage_z = steps_to_mm(physical_.z - work_origin_.z, Axis::Z, config_);
  const double depth = carriage_z - config_.paper_surface_z_mm - flex_displacement(x, y, flex_);
  return PenSample{now_s_, x, y, -depth, depth >= 0.0};
}

// ---------------------------------------------------------------------------
// TrapezoidProfile

TrapezoidProfile::TrapezoidProfile(double distance, double max_speed, double accel) {
  if (!(distance > 0.0) || !(max_speed > 0.0)) return;
  distance_ = distance;
  accel_ = accel;
  if (std::isinf(accel)) {
    peak_speed_ = max_speed;
    cruise_time_ = distance / max_speed;
  } else {
    const double ramp = max_speed * max_speed / (2.0 * accel);
    if (2.0 * ramp <= distance) {
      peak_speed_ = max_speed;
      ramp_distance_ = ramp;
      ramp_time_ = max_speed / accel;
      cruise_time_ = (distance - 2.0 * ramp) / max_speed;
    } else {
      // Triangular: never reaches max_speed.
      peak_speed_ = std::sqrt(accel * distance);
      ramp_distance_ = distance / 2.0;
      ramp_time_ = peak_speed_ / accel;
    }
  }
  duration_ = 2.0 * ramp_time_ + cruise_time_;
}

double TrapezoidProfile::position(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= duration_) return distance_;
  if (t < ramp_time_) return 0.5 * accel_ * t * t;
  if (t < ramp_time_ + cruise_time_) return ramp_distance_ + peak_speed_ * (t - ramp_time_);
  const double remaining = duration_ - t;
  return distance_ - 0.5 * accel_ * remaining * remaining;
}

double TrapezoidProfile::velocity(double t) const {
  if (t <= 0.0 || t >= duration_) return 0.0;
  if (t < ramp_time_) return accel_ * t;
  if (t < ramp_time_ + cruise_time_) return peak_speed_;
  return accel_ * (duration_ - t);
}

// ---------------------------------------------------------------------------
// Planning

MotionPlan plan_move(const StepPosition& current, const StepPosition& target, const MachineConfig& config) {
  MotionPlan plan;
  plan.start = current;
  plan.target = target;

  Steps longest = 0;
  for (Axis a : kAllAxes) {
    const Steps delta = target[a] - current[a];
    plan.axes[index(a)].delta_steps = delta;
    // Strict comparison keeps the earlier axis on ties: X over Y over Z.
    if (std::llabs(delta) > longest) {
      longest = std::llabs(delta);
      plan.dominant = a;
    }
  }
  if (longest == 0) return plan;

  // The dominant axis runs as fast as every involved axis allows once scaled
  // by its distance ratio.
  const auto dom = static_cast<double>(longest);
  double speed = config.axis(plan.dominant).max_step_rate;
  double accel = config.axis(plan.dominant).accel_steps_s2;
  for (Axis a : kAllAxes) {
    const auto d = static_cast<double>(std::llabs(plan.axes[index(a)].delta_steps));
    if (d == 0.0) continue;
    speed = std::min(speed, config.axis(a).max_step_rate * dom / d);
    accel = std::min(accel, config.axis(a).accel_steps_s2 * dom / d);
  }
  for (Axis a : kAllAxes) {
    auto& m = plan.axes[index(a)];
    const auto ratio = static_cast<double>(std::llabs(m.delta_steps)) / dom;
    m.speed_steps_s = a == plan.dominant ? speed : speed * ratio;
    m.accel_steps_s2 = a == plan.dominant ? accel : accel * ratio;
  }
  plan.dominant_profile = TrapezoidProfile(dom, speed, accel);
  return plan;
}

// ---------------------------------------------------------------------------
// Command handling

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Idle: return "idle";
    case Mode::Homing: return "homing";
    case Mode::Moving: return "moving";
    case Mode::Fault: return "fault";
  }
  return "?";
}

bool within_bounds(const StepPosition& p, const MachineConfig& config) {
  return std::all_of(kAllAxes.begin(), kAllAxes.end(),
                     [&](Axis a) { return p[a] >= 0 && p[a] <= config.travel_steps(a); });
}

namespace {

proto::Error make_error(std::string_view code, std::string message) {
  return proto::Error{std::string(code), std::move(message)};
}

std::uint32_t slots(const FirmwareState& state, const MachineConfig& config) {
  return static_cast<std::uint32_t>(state.free_slots(config));
}

void enter_fault(FirmwareState& state, std::string reason) {
  state.mode = Mode::Fault;
  state.homed = false;
  state.queue.clear();
  state.active.reset();
  state.homing.reset();
  state.fault_reason = std::move(reason);
}

void record(PenTrace& trace, const SimulatedMachine& machine) {
  auto s = machine.sample();
  if (!trace.empty() && trace.back().t >= s.t) {
    trace.back() = s;
  } else {
    trace.push_back(s);
  }
}

enum class Progress { Running, Completed, Faulted };

// Advances the active move by one tick. Each axis tracks a scaled copy of the
// dominant axis profile and emits whole steps as its ideal position crosses
// them; the final tick snaps to the exact target.
Progress advance_motion(FirmwareState& state, SimulatedMachine& machine, PenTrace& trace, double tick_s,
                        Steps* steps_emitted) {
  auto& active = *state.active;
  const auto& plan = active.plan;
  const auto& config = machine.config();
  ++active.elapsed_ticks;
  const double t = static_cast<double>(active.elapsed_ticks) * tick_s;
  const bool done = t + 1e-12 >= plan.duration();
  const double dom = plan.dominant_profile.distance();
  const double fraction = done || dom == 0.0 ? 1.0 : plan.dominant_profile.position(t) / dom;

  bool moved = false;
  for (Axis a : kAllAxes) {
    const Steps delta = plan.axis(a).delta_steps;
    if (delta == 0) continue;
    const Steps magnitude = std::llabs(delta);
    Steps travelled = done ? magnitude
                           : static_cast<Steps>(std::floor(fraction * static_cast<double>(magnitude) + 1e-9));
    travelled = std::clamp<Steps>(travelled, 0, magnitude);
    const int dir = delta > 0 ? 1 : -1;
    const Steps desired = plan.start[a] + dir * travelled;
    const Steps limit = config.travel_steps(a);
    while (state.position[a] != desired) {
      const Steps next = state.position[a] + dir;
      if (next < 0 || next > limit) {
        if (moved) record(trace, machine);
        enter_fault(state, std::string("limit violation on ") + axis_name(a) + " at step " + std::to_string(next));
        return Progress::Faulted;
      }
      machine.step(a, dir);
      state.position[a] = next;
      moved = true;
      if (steps_emitted) ++*steps_emitted;
    }
  }
  if (moved || done) record(trace, machine);
  return done ? Progress::Completed : Progress::Running;
}

void finish_homing(FirmwareState& state, SimulatedMachine& machine, std::string& outbox) {
  machine.set_work_origin(machine.physical());
  state.position = StepPosition{};
  state.homed = true;
  state.homing.reset();
  state.mode = Mode::Idle;
  outbox += proto::encode_feedback(proto::Homed{});
  outbox += proto::encode_feedback(proto::Ready{slots(state, machine.config())});
}

void advance_homing(FirmwareState& state, SimulatedMachine& machine, PenTrace& trace, double tick_s,
                    std::string& outbox) {
  auto& h = *state.homing;
  const auto& config = machine.config();
  bool moved = false;
  h.step_budget += config.axis(state.homing_axis()).max_step_rate * tick_s;
  while (state.mode == Mode::Homing) {
    const Axis axis = state.homing_axis();
    const auto& ax = config.axis(axis);
    if (h.phase == HomingPhase::Seeking) {
      if (machine.switch_triggered(axis)) {
        h.phase = HomingPhase::BackingOff;
        h.backoff_steps = 0;
        continue;
      }
      if (h.seek_steps >= 2 * config.travel_steps(axis)) {
        enter_fault(state, std::string("homing timeout on ") + axis_name(axis));
        outbox += proto::encode_feedback(
            make_error(proto::codes::kHomingTimeout, std::string("axis ") + axis_name(axis) + " switch not found"));
        break;
      }
      if (h.step_budget < 1.0) break;
      machine.step(axis, -1);
      ++h.seek_steps;
      h.step_budget -= 1.0;
      moved = true;
    } else {
      if (h.backoff_steps >= ax.homing_backoff_steps) {
        if (h.axis_index + 1 == kHomingOrder.size()) {
          finish_homing(state, machine, outbox);
          break;
        }
        h = HomingProgress{h.axis_index + 1, HomingPhase::Seeking, 0, 0, h.step_budget};
        continue;
      }
      if (h.step_budget < 1.0) break;
      machine.step(axis, +1);
      ++h.backoff_steps;
      h.step_budget -= 1.0;
      moved = true;
    }
  }
  if (moved) record(trace, machine);
}

}  // namespace

CommandOutcome handle_command(FirmwareState state, const proto::Command& cmd, const MachineConfig& config) {
  if (std::holds_alternative<proto::Home>(cmd)) {
    state.mode = Mode::Homing;
    state.homed = false;
    state.queue.clear();
    state.active.reset();
    state.fault_reason.clear();
    state.homing = HomingProgress{};
    return {std::move(state), std::nullopt};
  }

  const auto& move = std::get<proto::Move>(cmd);
  const StepPosition target{move.x, move.y, move.z};
  if (state.mode == Mode::Fault)
    return {std::move(state), make_error(proto::codes::kFault, "controller faulted; send HOME")};
  if (!state.homed) return {std::move(state), make_error(proto::codes::kNotHomed, "home before moving")};
  if (!within_bounds(target, config))
    return {std::move(state), make_error(proto::codes::kOutOfBounds, "target " + to_string(target))};
  if (state.queue.size() >= config.buffer_capacity)
    return {std::move(state), make_error(proto::codes::kQueueFull, "queue full")};
  state.queue.push_back(target);
  const auto free = slots(state, config);
  return {std::move(state), proto::Ready{free}};
}

bool start_next_move(FirmwareState& state, const MachineConfig& config) {
  if (!state.homed || state.active || state.queue.empty() || state.mode != Mode::Idle) return false;
  const StepPosition target = state.queue.front();
  state.queue.pop_front();
  state.active = ActiveMove{plan_move(state.position, target, config), 0};
  state.mode = Mode::Moving;
  return true;
}

proto::MoveDone finish_active_move(FirmwareState& state, const MachineConfig& config) {
  if (!state.active) throw std::logic_error("finish_active_move without an active move");
  state.position = state.active->plan.target;
  state.active.reset();
  state.mode = Mode::Idle;
  return proto::MoveDone{slots(state, config)};
}

std::string firmware_tick(FirmwareState& state, std::string_view inbox, SimulatedMachine& machine, PenTrace& trace,
                          double tick_s) {
  const auto& config = machine.config();
  std::string outbox;
  machine.advance_clock(tick_s);

  if (!inbox.empty()) {
    for (auto& frame : state.framer.feed(inbox)) {
      if (frame.overflow) {
        outbox += proto::encode_feedback(make_error(proto::codes::kMalformed, "line too long"));
        continue;
      }
      auto parsed = proto::parse_command(frame.line);
      if (!parsed) {
        outbox += proto::encode_feedback(make_error(proto::codes::kMalformed, parsed.error));
        continue;
      }
      auto outcome = handle_command(std::move(state), *parsed.value, config);
      state = std::move(outcome.state);
      if (outcome.feedback) outbox += proto::encode_feedback(*outcome.feedback);
    }
  }

  if (state.mode == Mode::Homing) {
    advance_homing(state, machine, trace, tick_s, outbox);
  } else if (state.mode == Mode::Moving && state.active) {
    switch (advance_motion(state, machine, trace, tick_s, nullptr)) {
      case Progress::Running: break;
      case Progress::Completed:
        outbox += proto::encode_feedback(finish_active_move(state, config));
        break;
      case Progress::Faulted:
        outbox += proto::encode_feedback(make_error(proto::codes::kLimit, state.fault_reason));
        break;
    }
  }

  start_next_move(state, config);
  return outbox;
}

HomingResult run_homing(FirmwareState state, SimulatedMachine& machine, double tick_s) {
  HomingResult result;
  state = handle_command(std::move(state), proto::Home{}, machine.config()).state;
  PenTrace scratch;
  while (state.mode == Mode::Homing) {
    result.outbox += firmware_tick(state, {}, machine, scratch, tick_s);
    ++result.ticks;
    scratch.clear();
  }
  result.state = std::move(state);
  return result;
}

ExecutionResult execute_plan(const MotionPlan& plan, FirmwareState state, SimulatedMachine& machine,
                             double tick_s) {
  ExecutionResult result;
  if (state.position != plan.start) throw std::invalid_argument("plan does not start at the current position");
  state.active = ActiveMove{plan, 0};
  state.mode = Mode::Moving;
  while (true) {
    machine.advance_clock(tick_s);
    ++result.ticks;
    const auto progress = advance_motion(state, machine, result.trace, tick_s, &result.steps_emitted);
    if (progress == Progress::Completed) {
      result.outbox += proto::encode_feedback(finish_active_move(state, machine.config()));
      break;
    }
    if (progress == Progress::Faulted) {
      result.outbox += proto::encode_feedback(make_error(proto::codes::kLimit, state.fault_reason));
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

}  // namespace scribe::firmware
