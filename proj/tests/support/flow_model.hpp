// Exhaustive exploration of host/firmware message interleavings.
//
// The host side is the real FlowWindow driven the way stream_job drives it;
// the firmware side is the real command handler and queue. Messages travel
// through two FIFO channels, and every reachable ordering of the four
// actions (host send, firmware receive, firmware step, host receive) is
// explored.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scribe/firmware.hpp"
#include "scribe/hostctl/streaming.hpp"

namespace scribe::testing {

struct FlowCheckResult {
  std::uint64_t states = 0;
  std::uint64_t terminal_states = 0;
  std::uint64_t sends = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

class FlowModel {
 public:
  FlowModel(std::size_t capacity, std::size_t points) : points_(points) {
    config_.buffer_capacity = capacity;
    config_.axis(Axis::X).travel_mm = 100.0;
  }

  FlowCheckResult run(std::uint64_t state_limit = 50'000'000) {
    FlowCheckResult result;
    State init;
    init.fw.homed = true;
    init.window = hostctl::FlowWindow(static_cast<std::uint32_t>(config_.buffer_capacity));
    std::vector<State> stack{init};
    std::set<std::string> seen{key(init)};
    while (!stack.empty()) {
      if (seen.size() > state_limit) {
        result.violations.push_back("state limit exceeded");
        break;
      }
      State s = std::move(stack.back());
      stack.pop_back();
      ++result.states;
      auto next = successors(s, result);
      if (next.empty()) {
        ++result.terminal_states;
        check_terminal(s, result);
      }
      for (auto& n : next) {
        if (seen.insert(key(n)).second) stack.push_back(std::move(n));
      }
      if (result.violations.size() > 10) break;
    }
    return result;
  }

 private:
  struct State {
    hostctl::FlowWindow window;
    std::size_t next_send = 0;
    std::deque<std::size_t> to_fw;  // point indices in transit
    firmware::FirmwareState fw;
    std::deque<protocol::Feedback> to_host;
    std::size_t completed = 0;      // points the firmware finished, in order
    std::size_t acknowledged = 0;   // DONE reports the host has consumed
  };

  static std::size_t index_of(const StepPosition& p) { return static_cast<std::size_t>(p.x - 1); }

  std::string key(const State& s) const {
    std::string k = std::to_string(s.window.window()) + "," + std::to_string(s.window.in_flight()) + "," +
                    std::to_string(s.next_send) + "|";
    for (auto i : s.to_fw) k += std::to_string(i) + ",";
    k += "|";
    for (const auto& p : s.fw.queue) k += std::to_string(index_of(p)) + ",";
    k += "|" + (s.fw.active ? std::to_string(index_of(s.fw.active->plan.target)) : std::string("-")) + "|";
    for (const auto& f : s.to_host) k += protocol::describe(f) + ";";
    k += "|" + std::to_string(s.completed) + "," + std::to_string(s.acknowledged);
    return k;
  }

  std::vector<State> successors(const State& s, FlowCheckResult& result) const {
    std::vector<State> out;

    // Host sends the next point if its window allows.
    if (s.next_send < points_ && s.window.can_send()) {
      State n = s;
      if (!(n.window.in_flight() < n.window.window())) result.violations.push_back("send outside the window");
      n.window.on_sent();
      if (n.window.in_flight() > n.window.window()) result.violations.push_back("in-flight exceeds window at send");
      if (n.window.in_flight() > config_.buffer_capacity)
        result.violations.push_back("in-flight exceeds firmware capacity");
      n.to_fw.push_back(n.next_send++);
      ++result.sends;
      out.push_back(std::move(n));
    }

    // Firmware receives one command.
    if (!s.to_fw.empty()) {
      State n = s;
      const auto idx = n.to_fw.front();
      n.to_fw.pop_front();
      const protocol::Move move{static_cast<Steps>(idx + 1), 0, 0};
      auto outcome = firmware::handle_command(std::move(n.fw), move, config_);
      n.fw = std::move(outcome.state);
      if (outcome.feedback) {
        if (const auto* e = std::get_if<protocol::Error>(&*outcome.feedback))
          result.violations.push_back("firmware rejected point " + std::to_string(idx) + ": " + e->code);
        n.to_host.push_back(*outcome.feedback);
      }
      check_firmware(n, result);
      out.push_back(std::move(n));
    }

    // Firmware starts the next queued move.
    if (!s.fw.active && !s.fw.queue.empty()) {
      State n = s;
      firmware::start_next_move(n.fw, config_);
      out.push_back(std::move(n));
    }

    // Firmware finishes the active move.
    if (s.fw.active) {
      State n = s;
      const auto idx = index_of(n.fw.active->plan.target);
      if (idx != n.completed)
        result.violations.push_back("point " + std::to_string(idx) + " executed out of order");
      n.fw.position = n.fw.active->plan.target;
      n.to_host.push_back(firmware::finish_active_move(n.fw, config_));
      ++n.completed;
      check_firmware(n, result);
      out.push_back(std::move(n));
    }

    // Host consumes one report.
    if (!s.to_host.empty()) {
      State n = s;
      const auto fb = n.to_host.front();
      n.to_host.pop_front();
      if (const auto* r = std::get_if<protocol::Ready>(&fb)) {
        n.window.on_ready(r->free_slots);
      } else if (const auto* d = std::get_if<protocol::MoveDone>(&fb)) {
        n.window.on_done(d->free_slots);
        ++n.acknowledged;
      } else if (std::holds_alternative<protocol::Error>(fb)) {
        n.window.on_rejected();
      }
      out.push_back(std::move(n));
    }
    return out;
  }

  void check_firmware(const State& s, FlowCheckResult& result) const {
    if (s.fw.queue.size() > config_.buffer_capacity) result.violations.push_back("firmware queue overflow");
  }

  void check_terminal(const State& s, FlowCheckResult& result) const {
    if (s.completed != points_ || s.acknowledged != points_ || s.next_send != points_ || s.window.in_flight() != 0)
      result.violations.push_back("deadlock: " + std::to_string(s.completed) + "/" + std::to_string(points_) +
                                  " points completed");
  }

  MachineConfig config_;
  std::size_t points_;
};

}  // namespace scribe::testing
