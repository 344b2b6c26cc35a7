#include "scribe/hostctl/streaming.hpp"

#include <deque>

namespace scribe::hostctl {

namespace proto = scribe::protocol;

const char* outcome_name(JobOutcome outcome) {
  switch (outcome) {
    case JobOutcome::Completed: return "completed";
    case JobOutcome::FirmwareRejected: return "firmware_rejected";
    case JobOutcome::FirmwareFault: return "firmware_fault";
    case JobOutcome::TransportClosed: return "transport_closed";
    case JobOutcome::ProtocolError: return "protocol_error";
    case JobOutcome::Stalled: return "stalled";
    case JobOutcome::Aborted: return "aborted";
  }
  return "?";
}

namespace {

// Codes the firmware sends as the direct reply to a MOVE; anything else is an
// asynchronous fault.
bool is_move_reply(std::string_view code) {
  return code == proto::codes::kQueueFull || code == proto::codes::kOutOfBounds ||
         code == proto::codes::kNotHomed || code == proto::codes::kMalformed || code == proto::codes::kFault;
}

}  // namespace

JobReport stream_job(const std::vector<TargetPoint>& points, Transport& transport, const StreamOptions& options) {
  JobReport report;
  report.points_total = points.size();
  if (points.empty()) return report;

  const double started = transport.now_s();
  FlowWindow window(options.initial_free_slots);
  proto::LineFramer framer;
  std::deque<std::size_t> accepted;  // accepted, not yet done, in firmware order
  std::size_t replies = 0;           // READY or rejection per sent move
  std::size_t done_total = 0;
  bool stopping = false;             // no more sends; drain what is accepted
  bool hard_stop = false;            // nothing more will arrive
  std::uint64_t idle_polls = 0;

  auto emit = [&](StreamEvent::Kind kind, std::size_t idx) {
    if (options.on_event) options.on_event(StreamEvent{kind, idx, window.in_flight(), window.window()});
  };
  auto fail = [&](JobOutcome outcome, std::string message) {
    if (report.outcome == JobOutcome::Completed) report.outcome = outcome;
    report.errors.push_back(std::move(message));
    stopping = true;
  };

  try {
    while (true) {
      if (!stopping && options.abort_requested && options.abort_requested()) {
        fail(JobOutcome::Aborted, "job aborted by operator");
      }
      while (!stopping && report.points_sent < points.size() && window.can_send()) {
        const auto& p = points[report.points_sent];
        transport.send(proto::encode_command(proto::Move{p.x, p.y, p.z}));
        window.on_sent();
        report.max_in_flight = std::max(report.max_in_flight, window.in_flight());
        emit(StreamEvent::Kind::Sent, report.points_sent);
        ++report.points_sent;
      }

      const bool all_replied = replies == report.points_sent;
      if (hard_stop || (all_replied && accepted.empty() && (stopping || done_total == points.size()))) break;
      if (!transport.is_open()) throw TransportClosed("transport closed");

      const auto bytes = transport.poll();
      if (bytes.empty()) {
        if (++idle_polls > options.stall_limit_polls) {
          fail(JobOutcome::Stalled, "no feedback from firmware");
          break;
        }
        continue;
      }
      idle_polls = 0;

      for (const auto& frame : framer.feed(bytes)) {
        auto parsed = frame.overflow ? proto::Parsed<proto::Feedback>::fail("feedback line too long")
                                     : proto::parse_feedback(frame.line);
        if (!parsed) {
          fail(JobOutcome::ProtocolError, "malformed feedback: " + parsed.error);
          hard_stop = true;
          break;
        }
        const auto& fb = *parsed.value;
        if (const auto* r = std::get_if<proto::Ready>(&fb)) {
          window.on_ready(r->free_slots);
          if (replies < report.points_sent) {
            accepted.push_back(replies);
            emit(StreamEvent::Kind::Accepted, replies);
            ++replies;
          }
        } else if (const auto* d = std::get_if<proto::MoveDone>(&fb)) {
          window.on_done(d->free_slots);
          if (accepted.empty()) {
            fail(JobOutcome::ProtocolError, "completion report with nothing outstanding");
            hard_stop = true;
            break;
          }
          const std::size_t idx = accepted.front();
          accepted.pop_front();
          ++done_total;
          if (!report.failed_point || idx + 1 < *report.failed_point) ++report.points_done;
          emit(StreamEvent::Kind::Completed, idx);
        } else if (const auto* e = std::get_if<proto::Error>(&fb)) {
          if (is_move_reply(e->code) && replies < report.points_sent) {
            window.on_rejected();
            if (!report.failed_point) report.failed_point = replies + 1;
            emit(StreamEvent::Kind::Rejected, replies);
            ++replies;
            fail(JobOutcome::FirmwareRejected, "point " + std::to_string(replies) + " rejected: " + e->code +
                                                   (e->message.empty() ? "" : " " + e->message));
          } else {
            fail(JobOutcome::FirmwareFault, "firmware fault: " + e->code + " " + e->message);
            hard_stop = true;
            break;
          }
        } else {
          fail(JobOutcome::FirmwareFault, "unexpected HOMED during job");
          hard_stop = true;
          break;
        }
      }
    }
  } catch (const TransportClosed& e) {
    fail(JobOutcome::TransportClosed, e.what());
  }

  report.duration_s = transport.now_s() - started;
  return report;
}

HomeReport home_machine(Transport& transport, std::uint64_t stall_limit_polls) {
  HomeReport report;
  const double started = transport.now_s();
  proto::LineFramer framer;
  bool homed = false;
  std::uint64_t idle = 0;
  transport.send(proto::encode_command(proto::Home{}));
  while (true) {
    if (!transport.is_open()) {
      report.error = "transport closed";
      break;
    }
    const auto bytes = transport.poll();
    if (bytes.empty()) {
      if (++idle > stall_limit_polls) {
        report.error = "homing did not finish";
        break;
      }
      continue;
    }
    idle = 0;
    for (const auto& frame : framer.feed(bytes)) {
      auto parsed = proto::parse_feedback(frame.line);
      if (!parsed) {
        report.error = "malformed feedback: " + parsed.error;
        break;
      }
      if (std::holds_alternative<proto::Homed>(*parsed.value)) {
        homed = true;
      } else if (const auto* r = std::get_if<proto::Ready>(&*parsed.value); r && homed) {
        report.ok = true;
        report.free_slots = r->free_slots;
      } else if (const auto* e = std::get_if<proto::Error>(&*parsed.value)) {
        report.error = e->code + (e->message.empty() ? "" : " " + e->message);
      }
    }
    if (report.ok || !report.error.empty()) break;
  }
  report.duration_s = transport.now_s() - started;
  return report;
}

}  // namespace scribe::hostctl
