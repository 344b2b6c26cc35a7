// HTTP front end for one live virtual machine.
//
//   POST   /home              home the machine
//   POST   /jobs {"text":..}  queue a write job, returns {"id":..}
//   GET    /jobs              recent jobs
//   GET    /jobs/{id}         job state
//   DELETE /jobs/{id}         abort
//   GET    /trace/{id}.svg    overlay of a finished job
//   GET    /events            text/event-stream of machine telemetry
//   GET    /status            current snapshot
//   GET    /config            active configuration
//
// All machine mutation happens on one worker thread fed by a command queue.

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scribe/config.hpp"

namespace scribe::service {

struct Event {
  std::uint64_t seq = 0;
  std::string type;
  nlohmann::json data;
};

/// Bounded fan-out buffer. Publishing never blocks on subscribers; a reader
/// that falls more than `capacity` events behind skips ahead.
class EventHub {
 public:
  explicit EventHub(std::size_t capacity = 4096);
  ~EventHub();

  std::uint64_t publish(std::string type, nlohmann::json data);

  /// Events with seq > after, waiting up to timeout_ms for at least one.
  /// Empty on timeout or after close().
  std::vector<Event> wait_after(std::uint64_t after, int timeout_ms) const;

  std::uint64_t last_seq() const;
  void close();
  bool closed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ServiceOptions {
  Config config;
  /// Simulated seconds per wall second; 0 runs unpaced.
  double realtime_factor = 1.0;
  std::size_t job_history = 100;
  int telemetry_period_ms = 40;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves in the background. Port 0 picks a free port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  bool listen(const std::string& host, int port);
  void stop();

  EventHub& events();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scribe::service
