#include "scribe/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "scribe/hostctl/strokes.hpp"
#include "scribe/simulation.hpp"

namespace scribe::service {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// EventHub

struct EventHub::Impl {
  mutable std::mutex m;
  mutable std::condition_variable cv;
  std::deque<Event> ring;
  std::size_t capacity;
  std::uint64_t seq = 0;
  bool closed = false;
};

EventHub::EventHub(std::size_t capacity) : impl_(std::make_unique<Impl>()) { impl_->capacity = capacity; }
EventHub::~EventHub() = default;

std::uint64_t EventHub::publish(std::string type, json data) {
  std::uint64_t seq;
  {
    std::lock_guard lk(impl_->m);
    seq = ++impl_->seq;
    impl_->ring.push_back(Event{seq, std::move(type), std::move(data)});
    while (impl_->ring.size() > impl_->capacity) impl_->ring.pop_front();
  }
  impl_->cv.notify_all();
  return seq;
}

std::vector<Event> EventHub::wait_after(std::uint64_t after, int timeout_ms) const {
  std::unique_lock lk(impl_->m);
  impl_->cv.wait_for(lk, std::chrono::milliseconds(timeout_ms),
                     [&] { return impl_->closed || impl_->seq > after; });
  std::vector<Event> out;
  if (impl_->closed) return out;
  for (const auto& e : impl_->ring)
    if (e.seq > after) out.push_back(e);
  return out;
}

std::uint64_t EventHub::last_seq() const {
  std::lock_guard lk(impl_->m);
  return impl_->seq;
}

void EventHub::close() {
  {
    std::lock_guard lk(impl_->m);
    impl_->closed = true;
  }
  impl_->cv.notify_all();
}

bool EventHub::closed() const {
  std::lock_guard lk(impl_->m);
  return impl_->closed;
}

// ---------------------------------------------------------------------------
// Service

namespace {

struct JobRecord {
  std::uint64_t id = 0;
  std::string text;
  JobPhase phase = JobPhase::Queued;
  std::size_t points_total = 0;
  std::size_t points_done = 0;
  std::optional<std::string> last_error;
  json report;
  json measurements;
  std::string svg;
  bool finished = false;
  std::array<double, 3> final_position{};
  std::atomic<bool> abort{false};
};

struct Telemetry {
  std::string mode = "idle";
  bool homed = false;
  PenSample pen{};
  std::size_t queue_depth = 0;
  std::size_t free_slots = 0;
  std::optional<std::uint64_t> job_id;
  std::string machine_phase = "idle";
};

struct Command {
  enum class Kind { Home, Job } kind = Kind::Home;
  std::shared_ptr<JobRecord> job;
};

json error_body(const std::string& message) { return json{{"error", message}}; }

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceOptions o) : opt(std::move(o)), link(opt.config.machine) {
    opt.config.validate();
    started = Clock::now();
    link.set_tick_hook([this](const VirtualLink& l) { on_tick(l); });
    capture(link);
    routes();
    worker = std::thread([this] { work(); });
  }

  ~Impl() { shutdown(); }

  // -- state shared with HTTP threads (guarded by m) --
  ServiceOptions opt;
  EventHub hub;
  httplib::Server server;
  std::thread http_thread;
  std::thread worker;
  std::mutex m;
  std::condition_variable cv;
  std::deque<Command> commands;
  bool busy = false;
  bool stopping = false;
  std::map<std::uint64_t, std::shared_ptr<JobRecord>> jobs;
  std::uint64_t next_id = 1;
  Telemetry telemetry;
  std::atomic<bool> halt{false};

  // -- worker-only --
  VirtualLink link;
  hostctl::VectorFontGenerator gen;
  Clock::time_point started;
  Clock::time_point last_publish{};
  Clock::time_point pace_wall0{};
  double pace_sim = 0.0;
  std::uint64_t tick_count = 0;
  std::shared_ptr<JobRecord> current;

  double wall_s() const { return std::chrono::duration<double>(Clock::now() - started).count(); }

  void shutdown() {
    {
      std::lock_guard lk(m);
      if (stopping) return;
      stopping = true;
      halt = true;
      for (auto& [id, job] : jobs) job->abort = true;
    }
    cv.notify_all();
    hub.close();
    server.stop();
    if (http_thread.joinable()) http_thread.join();
    if (worker.joinable()) worker.join();
  }

  // ---- worker side ----

  void capture(const VirtualLink& l) {
    std::lock_guard lk(m);
    const auto& st = l.state();
    telemetry.mode = firmware::mode_name(st.mode);
    telemetry.homed = st.homed;
    telemetry.pen = l.machine().sample();
    telemetry.queue_depth = st.queue.size();
    telemetry.free_slots = st.free_slots(l.machine().config());
    telemetry.job_id = current ? std::optional(current->id) : std::nullopt;
  }

  json position_json() {
    std::lock_guard lk(m);
    json j = {{"t", wall_s()},
              {"sim_t", telemetry.pen.t},
              {"x", telemetry.pen.x_mm},
              {"y", telemetry.pen.y_mm},
              {"z", telemetry.pen.z_mm},
              {"pen_down", telemetry.pen.pen_down},
              {"mode", telemetry.mode},
              {"queue_depth", telemetry.queue_depth},
              {"free_slots", telemetry.free_slots}};
    j["job_id"] = telemetry.job_id ? json(std::to_string(*telemetry.job_id)) : json(nullptr);
    return j;
  }

  void publish_position() {
    capture(link);
    hub.publish("position", position_json());
    last_publish = Clock::now();
  }

  void on_tick(const VirtualLink& l) {
    ++tick_count;
    pace_sim += firmware::kDefaultTickSeconds;
    if (opt.realtime_factor > 0.0 && !halt && tick_count % 8 == 0) {
      const auto target = pace_wall0 + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(pace_sim / opt.realtime_factor));
      if (target > Clock::now() + std::chrono::milliseconds(2)) std::this_thread::sleep_until(target);
    }
    if (Clock::now() - last_publish >= std::chrono::milliseconds(opt.telemetry_period_ms)) {
      capture(l);
      hub.publish("position", position_json());
      last_publish = Clock::now();
    }
  }

  void begin_pacing() {
    pace_wall0 = Clock::now();
    pace_sim = 0.0;
  }

  void machine_phase(const std::string& phase) {
    {
      std::lock_guard lk(m);
      telemetry.machine_phase = phase;
    }
    hub.publish("phase", json{{"scope", "machine"}, {"phase", phase}});
  }

  void work() {
    while (true) {
      Command cmd;
      {
        std::unique_lock lk(m);
        cv.wait_for(lk, std::chrono::milliseconds(opt.telemetry_period_ms),
                    [&] { return stopping || !commands.empty(); });
        if (stopping) break;
        if (commands.empty()) {
          lk.unlock();
          publish_position();
          continue;
        }
        cmd = std::move(commands.front());
        commands.pop_front();
      }
      begin_pacing();
      if (cmd.kind == Command::Kind::Home) {
        run_home();
      } else {
        run_job(cmd.job);
      }
      {
        std::lock_guard lk(m);
        busy = !commands.empty();
      }
    }
  }

  void run_home() {
    machine_phase("homing");
    const auto report = hostctl::home_machine(link);
    publish_position();
    if (report.ok) {
      machine_phase("idle");
    } else {
      hub.publish("error", json{{"scope", "machine"}, {"message", report.error}});
      machine_phase("fault");
    }
  }

  json job_json_locked(const JobRecord& job) const {
    json j = {{"id", std::to_string(job.id)},
              {"phase", phase_name(job.phase)},
              {"points_total", job.points_total},
              {"points_done", job.points_done},
              {"text", job.text},
              {"report", job.report},
              {"measurements", job.measurements}};
    const bool live = !job.finished && telemetry.job_id == job.id;
    j["current_position_mm"] = live ? json{{"x", telemetry.pen.x_mm}, {"y", telemetry.pen.y_mm},
                                           {"z", telemetry.pen.z_mm}}
                                    : json{{"x", job.final_position[0]}, {"y", job.final_position[1]},
                                           {"z", job.final_position[2]}};
    j["last_error"] = job.last_error ? json(*job.last_error) : json(nullptr);
    return j;
  }

  void set_phase(JobRecord& job, JobPhase phase) {
    json state;
    {
      std::lock_guard lk(m);
      job.phase = phase;
      telemetry.machine_phase = phase == JobPhase::Homing ? "homing" : phase == JobPhase::Writing ? "writing" : "idle";
      state = job_json_locked(job);
    }
    hub.publish("phase", json{{"scope", "job"}, {"job_id", std::to_string(job.id)}, {"phase", phase_name(phase)}});
    hub.publish("job", state);
  }

  void run_job(const std::shared_ptr<JobRecord>& job) {
    current = job;
    if (job->abort) {
      finish_job(*job, JobPhase::Failed, "job aborted by operator");
      return;
    }
    Clock::time_point last_progress{};
    WriteHooks hooks;
    hooks.on_phase = [&](JobPhase p) {
      if (p == JobPhase::Homing || p == JobPhase::Writing) set_phase(*job, p);
    };
    hooks.abort_requested = [&] { return job->abort.load(); };
    hooks.on_event = [&](const hostctl::StreamEvent& e) {
      if (e.kind != hostctl::StreamEvent::Kind::Completed) return;
      json progress;
      {
        std::lock_guard lk(m);
        ++job->points_done;
        if (Clock::now() - last_progress < std::chrono::milliseconds(opt.telemetry_period_ms)) return;
        progress = {{"job_id", std::to_string(job->id)},   {"points_done", job->points_done},
                    {"points_total", job->points_total},   {"in_flight", e.in_flight},
                    {"window", e.window}};
      }
      last_progress = Clock::now();
      hub.publish("progress", progress);
    };

    try {
      auto result = run_write_job(job->text, opt.config, gen, link, hooks);
      publish_position();
      {
        std::lock_guard lk(m);
        job->report = to_json(result.report);
        job->measurements = to_json(result.measurements);
        job->points_done = result.report.points_done;
        job->svg = std::move(result.svg);
      }
      std::optional<std::string> error;
      if (!result.report.errors.empty()) error = result.report.errors.front();
      finish_job(*job, result.ok() ? JobPhase::Done : JobPhase::Failed, error);
    } catch (const std::exception& e) {
      finish_job(*job, JobPhase::Failed, std::string(e.what()));
    }
  }

  void finish_job(JobRecord& job, JobPhase phase, std::optional<std::string> error) {
    capture(link);
    {
      std::lock_guard lk(m);
      job.last_error = std::move(error);
      job.final_position = {telemetry.pen.x_mm, telemetry.pen.y_mm, telemetry.pen.z_mm};
      job.finished = true;
    }
    current.reset();
    set_phase(job, phase);
    capture(link);
  }

  // ---- HTTP side ----

  json snapshot_locked() const {
    json j = {{"mode", telemetry.mode},
              {"phase", telemetry.machine_phase},
              {"homed", telemetry.homed},
              {"position_mm", {{"x", telemetry.pen.x_mm}, {"y", telemetry.pen.y_mm}, {"z", telemetry.pen.z_mm}}},
              {"pen_down", telemetry.pen.pen_down},
              {"queue_depth", telemetry.queue_depth},
              {"free_slots", telemetry.free_slots},
              {"busy", busy}};
    j["job"] = nullptr;
    if (telemetry.job_id) {
      if (auto it = jobs.find(*telemetry.job_id); it != jobs.end()) j["job"] = job_json_locked(*it->second);
    }
    return j;
  }

  void enqueue_locked(Command cmd) {
    busy = true;
    commands.push_back(std::move(cmd));
    cv.notify_all();
  }

  void trim_history_locked() {
    while (jobs.size() > opt.job_history) {
      auto it = std::find_if(jobs.begin(), jobs.end(), [](const auto& kv) { return kv.second->finished; });
      if (it == jobs.end()) break;
      jobs.erase(it);
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/home", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lk(m);
      if (busy) return reply(res, 409, error_body("machine is busy"));
      enqueue_locked(Command{Command::Kind::Home, nullptr});
      reply(res, 202, json{{"status", "homing"}});
    });

    server.Post("/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return reply(res, 400, error_body("body must be a JSON object"));
      if (!body.contains("text") || !body["text"].is_string())
        return reply(res, 400, error_body("missing string field 'text'"));
      for (const auto& [key, value] : body.items()) {
        if (key != "text") return reply(res, 400, error_body("unknown field '" + key + "'"));
      }
      const auto text = body["text"].get<std::string>();
      hostctl::JobPlan plan;
      try {
        plan = hostctl::plan_job(text, gen, opt.config);
      } catch (const std::exception& e) {
        return reply(res, 400, error_body(e.what()));
      }
      if (plan.targets.empty()) return reply(res, 400, error_body("text has nothing to draw"));

      std::lock_guard lk(m);
      if (busy) return reply(res, 409, error_body("a job is already active"));
      auto job = std::make_shared<JobRecord>();
      job->id = next_id++;
      job->text = text;
      job->points_total = plan.targets.size();
      jobs[job->id] = job;
      trim_history_locked();
      enqueue_locked(Command{Command::Kind::Job, job});
      json out = job_json_locked(*job);
      reply(res, 201, out);
      res.set_header("Location", "/jobs/" + std::to_string(job->id));
    });

    server.Get("/jobs", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lk(m);
      json list = json::array();
      for (const auto& [id, job] : jobs) list.push_back(job_json_locked(*job));
      reply(res, 200, list);
    });

    server.Get(R"(/jobs/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lk(m);
      const auto job = find_locked(req.matches[1]);
      if (!job) return reply(res, 404, error_body("unknown job"));
      reply(res, 200, job_json_locked(*job));
    });

    server.Delete(R"(/jobs/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lk(m);
      const auto job = find_locked(req.matches[1]);
      if (!job) return reply(res, 404, error_body("unknown job"));
      if (job->finished) return reply(res, 409, error_body("job is not active"));
      job->abort = true;
      reply(res, 202, job_json_locked(*job));
    });

    server.Get(R"(/trace/(\d+)\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lk(m);
      const auto job = find_locked(req.matches[1]);
      if (!job) return reply(res, 404, error_body("unknown job"));
      if (!job->finished || job->svg.empty()) return reply(res, 409, error_body("job has no trace yet"));
      res.set_content(job->svg, "image/svg+xml");
    });

    server.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lk(m);
      reply(res, 200, snapshot_locked());
    });

    server.Get("/config", [this](const httplib::Request&, httplib::Response& res) {
      json j = to_json(opt.config);
      j["service"] = {{"realtime_factor", opt.realtime_factor}, {"telemetry_period_ms", opt.telemetry_period_ms}};
      reply(res, 200, j);
    });

    server.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [this, last = std::uint64_t{0}, first = true](std::size_t, httplib::DataSink& sink) mutable {
            auto write = [&](const std::string& s) { return sink.write(s.data(), s.size()); };
            if (first) {
              first = false;
              last = hub.last_seq();
              json snap;
              {
                std::lock_guard lk(m);
                snap = snapshot_locked();
              }
              return write("id: " + std::to_string(last) + "\nevent: snapshot\ndata: " + snap.dump() + "\n\n");
            }
            const auto events = hub.wait_after(last, 250);
            if (hub.closed()) {
              sink.done();
              return false;
            }
            if (events.empty()) return write(": keepalive\n\n");
            std::string chunk;
            for (const auto& e : events) {
              chunk += "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + e.data.dump() + "\n\n";
              last = e.seq;
            }
            return write(chunk);
          });
    });
  }

  std::shared_ptr<JobRecord> find_locked(const std::string& id_text) const {
    std::uint64_t id = 0;
    try {
      id = std::stoull(id_text);
    } catch (const std::exception&) {
      return nullptr;
    }
    const auto it = jobs.find(id);
    return it == jobs.end() ? nullptr : it->second;
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->http_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void Service::stop() {
  if (impl_) impl_->shutdown();
}

EventHub& Service::events() { return impl_->hub; }

}  // namespace scribe::service
