// The virtual machine behind a Transport, and the end-to-end write job shared
// by the CLI and the service.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scribe/config.hpp"
#include "scribe/evaluation.hpp"
#include "scribe/firmware.hpp"
#include "scribe/hostctl/pipeline.hpp"
#include "scribe/hostctl/streaming.hpp"
#include "scribe/trace.hpp"

namespace scribe {

/// Serial link to an emulated controller. Every poll() runs exactly one
/// firmware tick with whatever bytes were sent since the previous poll.
class VirtualLink final : public hostctl::Transport {
 public:
  explicit VirtualLink(const MachineConfig& config, std::optional<StepPosition> physical_start = std::nullopt,
                       double tick_s = firmware::kDefaultTickSeconds);

  void send(std::string_view bytes) override;
  std::string poll() override;
  bool is_open() const override { return open_; }
  double now_s() const override { return machine_.now(); }

  void close() { open_ = false; }

  /// Drops everything recorded so far and restarts the clock at zero.
  void begin_recording();

  const PenTrace& trace() const { return trace_; }
  /// Pen sample at each move completion, in completion order.
  const std::vector<PenSample>& completions() const { return completions_; }
  PenTrace take_trace() { return std::move(trace_); }

  const firmware::FirmwareState& state() const { return state_; }
  const firmware::SimulatedMachine& machine() const { return machine_; }
  firmware::SimulatedMachine& machine() { return machine_; }

  /// Called after every tick; the service uses it for pacing and telemetry.
  void set_tick_hook(std::function<void(const VirtualLink&)> hook) { tick_hook_ = std::move(hook); }

 private:
  firmware::SimulatedMachine machine_;
  firmware::FirmwareState state_;
  double tick_s_;
  std::string pending_;
  PenTrace trace_;
  std::vector<PenSample> completions_;
  protocol::LineFramer outbound_;
  bool open_ = true;
  std::function<void(const VirtualLink&)> tick_hook_;
};

/// Where the carriage sits when a fresh virtual machine powers on.
StepPosition default_power_on_position(const MachineConfig& config);

enum class JobPhase : std::uint8_t { Queued, Homing, Writing, Done, Failed };
const char* phase_name(JobPhase phase);

struct Measurements {
  std::optional<double> max_deviation_mm;
  std::optional<double> writing_speed_mm_min;
  std::optional<double> max_depth_error_mm;
};

struct WriteResult {
  hostctl::JobPlan plan;
  hostctl::HomeReport home;
  hostctl::JobReport report;
  PenTrace trace;
  std::vector<PenSample> completions;
  Measurements measurements;
  std::string svg;

  bool ok() const { return home.ok && report.ok(); }
};

struct WriteHooks {
  std::function<void(JobPhase)> on_phase;
  std::function<void(const hostctl::StreamEvent&)> on_event;
  std::function<bool()> abort_requested;
};

/// Plan, home, stream, measure and render one text job on `link`.
/// Planning errors (unsupported glyph in strict mode, text off the work area)
/// propagate as exceptions before the machine is touched.
WriteResult run_write_job(std::string_view text, const Config& config, const hostctl::StrokeGenerator& gen,
                          VirtualLink& link, const WriteHooks& hooks = {});

/// Pen sample list as CSV: t,x_mm,y_mm,z_mm,pen_down.
std::string trace_to_csv(const PenTrace& trace);
PenTrace trace_from_csv(std::string_view csv);

/// Reference polylines, one per line: "x,y x,y ...".
std::string reference_to_text(const std::vector<Polyline>& reference);
std::vector<Polyline> reference_from_text(std::string_view text);

nlohmann::json to_json(const hostctl::JobReport& report);
nlohmann::json to_json(const Measurements& m);

}  // namespace scribe
