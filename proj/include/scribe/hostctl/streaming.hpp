// Flow-controlled delivery of a target queue to the firmware.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/hostctl/pipeline.hpp"
#include "scribe/protocol.hpp"

namespace scribe::hostctl {

class TransportClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte pipe to the firmware. poll() waits for at most one scheduling
/// quantum and returns whatever bytes arrived (possibly none).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::string_view bytes) = 0;
  virtual std::string poll() = 0;
  virtual bool is_open() const = 0;
  virtual double now_s() const = 0;
};

/// Host-side window: moves sent but not yet reported done never exceed the
/// firmware's most recently reported free slot count.
class FlowWindow {
 public:
  explicit FlowWindow(std::uint32_t initial_free_slots = 0) : window_(initial_free_slots) {}

  bool can_send() const { return in_flight_ < window_; }
  void on_sent() { ++in_flight_; }
  void on_ready(std::uint32_t free_slots) { window_ = free_slots; }
  void on_done(std::uint32_t free_slots) {
    window_ = free_slots;
    if (in_flight_ > 0) --in_flight_;
  }
  void on_rejected() {
    if (in_flight_ > 0) --in_flight_;
  }

  std::uint32_t window() const { return window_; }
  std::uint32_t in_flight() const { return in_flight_; }

  bool operator==(const FlowWindow&) const = default;

 private:
  std::uint32_t window_;
  std::uint32_t in_flight_ = 0;
};

struct StreamEvent {
  enum class Kind : std::uint8_t { Sent, Accepted, Completed, Rejected };
  Kind kind = Kind::Sent;
  std::size_t index = 0;  // zero-based point index
  std::uint32_t in_flight = 0;
  std::uint32_t window = 0;
};

enum class JobOutcome : std::uint8_t {
  Completed,
  FirmwareRejected,  // a point was refused (bounds, queue, not homed, ...)
  FirmwareFault,     // the controller faulted while running
  TransportClosed,
  ProtocolError,     // unparseable feedback
  Stalled,           // no feedback within the stall limit
  Aborted,
};

const char* outcome_name(JobOutcome outcome);

struct JobReport {
  JobOutcome outcome = JobOutcome::Completed;
  std::size_t points_total = 0;
  std::size_t points_sent = 0;
  std::size_t points_done = 0;  // completed points preceding any failure
  std::uint32_t max_in_flight = 0;
  double duration_s = 0.0;
  std::optional<std::size_t> failed_point;  // 1-based
  std::vector<std::string> errors;

  bool ok() const { return outcome == JobOutcome::Completed; }
  bool operator==(const JobReport&) const = default;
};

struct StreamOptions {
  std::uint32_t initial_free_slots = 0;
  std::uint64_t stall_limit_polls = 2'000'000;
  std::function<void(const StreamEvent&)> on_event;
  std::function<bool()> abort_requested;
};

/// Sends every point exactly once, in order, and waits for each to finish.
/// The firmware must already be homed.
JobReport stream_job(const std::vector<TargetPoint>& points, Transport& transport, const StreamOptions& options);

struct HomeReport {
  bool ok = false;
  std::uint32_t free_slots = 0;
  std::string error;
  double duration_s = 0.0;
};

/// Sends HOME and waits for HOMED plus the firmware's READY capacity report.
HomeReport home_machine(Transport& transport, std::uint64_t stall_limit_polls = 2'000'000);

}  // namespace scribe::hostctl
