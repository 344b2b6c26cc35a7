#include "scribe/simulation.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace scribe {

namespace proto = scribe::protocol;

VirtualLink::VirtualLink(const MachineConfig& config, std::optional<StepPosition> physical_start, double tick_s)
    : machine_(config, physical_start.value_or(default_power_on_position(config))), tick_s_(tick_s) {}

void VirtualLink::send(std::string_view bytes) {
  if (!open_) throw hostctl::TransportClosed("virtual link closed");
  pending_.append(bytes);
}

std::string VirtualLink::poll() {
  if (!open_) throw hostctl::TransportClosed("virtual link closed");
  std::string inbox;
  inbox.swap(pending_);
  auto out = firmware::firmware_tick(state_, inbox, machine_, trace_, tick_s_);
  if (!out.empty()) {
    for (const auto& frame : outbound_.feed(out)) {
      if (frame.line.rfind("DONE ", 0) == 0) completions_.push_back(machine_.sample());
    }
  }
  if (tick_hook_) tick_hook_(*this);
  return out;
}

void VirtualLink::begin_recording() {
  trace_.clear();
  completions_.clear();
  machine_.reset_clock();
}

StepPosition default_power_on_position(const MachineConfig& config) {
  return {config.travel_steps(Axis::X) / 2, config.travel_steps(Axis::Y) / 2, config.travel_steps(Axis::Z) / 4};
}

const char* phase_name(JobPhase phase) {
  switch (phase) {
    case JobPhase::Queued: return "queued";
    case JobPhase::Homing: return "homing";
    case JobPhase::Writing: return "writing";
    case JobPhase::Done: return "done";
    case JobPhase::Failed: return "failed";
  }
  return "?";
}

namespace {

Measurements measure(const WriteResult& r, const Config& config) {
  Measurements m;
  try {
    m.max_deviation_mm = evaluation::max_deviation(r.plan.reference, r.trace);
  } catch (const evaluation::EmptyInput&) {
  }
  try {
    m.writing_speed_mm_min = evaluation::writing_speed(r.trace);
  } catch (const evaluation::NoDrawSegments&) {
  }
  if (!r.completions.empty()) {
    m.max_depth_error_mm = evaluation::max_depth_error(r.plan.targets, r.completions, config.host.writing_depth_mm);
  }
  return m;
}

}  // namespace

WriteResult run_write_job(std::string_view text, const Config& config, const hostctl::StrokeGenerator& gen,
                          VirtualLink& link, const WriteHooks& hooks) {
  auto phase = [&](JobPhase p) {
    if (hooks.on_phase) hooks.on_phase(p);
  };

  WriteResult result;
  result.plan = hostctl::plan_job(text, gen, config);

  phase(JobPhase::Homing);
  result.home = hostctl::home_machine(link);
  if (!result.home.ok) {
    result.report.points_total = result.plan.targets.size();
    result.report.outcome = hostctl::JobOutcome::FirmwareFault;
    result.report.errors.push_back("homing failed: " + result.home.error);
    phase(JobPhase::Failed);
    return result;
  }

  phase(JobPhase::Writing);
  link.begin_recording();
  hostctl::StreamOptions options;
  options.initial_free_slots = result.home.free_slots;
  options.on_event = hooks.on_event;
  options.abort_requested = hooks.abort_requested;
  result.report = hostctl::stream_job(result.plan.targets, link, options);

  if (result.report.outcome == hostctl::JobOutcome::Aborted && link.is_open() &&
      link.state().mode == firmware::Mode::Idle) {
    // Leave the pen up where it stopped.
    const auto& pos = link.state().position;
    const hostctl::TargetPoint lift{pos.x, pos.y, hostctl::lifted_z(config.machine, config.host),
                                    hostctl::PenState::Travel};
    hostctl::StreamOptions lift_options;
    lift_options.initial_free_slots = static_cast<std::uint32_t>(link.state().free_slots(config.machine));
    hostctl::stream_job({lift}, link, lift_options);
  }

  result.trace = link.trace();
  result.completions = link.completions();
  result.completions.resize(std::min(result.completions.size(), result.plan.targets.size()));
  result.measurements = measure(result, config);
  result.svg = evaluation::render_svg(result.plan.reference, result.trace);
  phase(result.report.ok() ? JobPhase::Done : JobPhase::Failed);
  return result;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  return out;
}

}  // namespace

std::string trace_to_csv(const PenTrace& trace) {
  std::string out = "t,x_mm,y_mm,z_mm,pen_down\n";
  for (const auto& s : trace) {
    out += fixed(s.t, 6) + "," + fixed(s.x_mm, 6) + "," + fixed(s.y_mm, 6) + "," + fixed(s.z_mm, 6) + "," +
           (s.pen_down ? "1" : "0") + "\n";
  }
  return out;
}

PenTrace trace_from_csv(std::string_view csv) {
  PenTrace trace;
  bool header = true;
  for (const auto line : lines_of(csv)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "t,x_mm,y_mm,z_mm,pen_down") continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5 || (f[4] != "0" && f[4] != "1"))
      throw std::invalid_argument("bad trace row '" + std::string(line) + "'");
    trace.push_back({parse_double(f[0], "time"), parse_double(f[1], "x"), parse_double(f[2], "y"),
                     parse_double(f[3], "z"), f[4] == "1"});
  }
  return trace;
}

std::string reference_to_text(const std::vector<Polyline>& reference) {
  std::string out;
  for (const auto& line : reference) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out += ' ';
      out += fixed(line[i].x, 6) + "," + fixed(line[i].y, 6);
    }
    out += '\n';
  }
  return out;
}

std::vector<Polyline> reference_from_text(std::string_view text) {
  std::vector<Polyline> out;
  for (const auto line : lines_of(text)) {
    if (line.empty() || line[0] == '#') continue;
    Polyline poly;
    for (const auto tok : split(line, ' ')) {
      if (tok.empty()) continue;
      const auto xy = split(tok, ',');
      if (xy.size() != 2) throw std::invalid_argument("bad reference point '" + std::string(tok) + "'");
      poly.push_back({parse_double(xy[0], "x"), parse_double(xy[1], "y")});
    }
    if (!poly.empty()) out.push_back(std::move(poly));
  }
  return out;
}

nlohmann::json to_json(const hostctl::JobReport& r) {
  nlohmann::json j = {{"outcome", hostctl::outcome_name(r.outcome)},
                      {"points_total", r.points_total},
                      {"points_sent", r.points_sent},
                      {"points_done", r.points_done},
                      {"max_in_flight", r.max_in_flight},
                      {"duration_s", r.duration_s},
                      {"errors", r.errors}};
  j["failed_point"] = r.failed_point ? nlohmann::json(*r.failed_point) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const Measurements& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"max_deviation_mm", opt(m.max_deviation_mm)},
          {"writing_speed_mm_min", opt(m.writing_speed_mm_min)},
          {"max_depth_error_mm", opt(m.max_depth_error_mm)}};
}

}  // namespace scribe
