#include "scribe/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace scribe {

using nlohmann::json;

void HostConfig::validate() const {
  if (chars_per_line < 1) throw std::invalid_argument("host.chars_per_line must be >= 1");
  if (!(letter_height_mm > 0.0)) throw std::invalid_argument("host.letter_height_mm must be > 0");
  if (!(line_spacing_mm > 0.0)) throw std::invalid_argument("host.line_spacing_mm must be > 0");
  if (!(lift_height_mm > 0.0)) throw std::invalid_argument("host.lift_height_mm must be > 0");
  if (!(writing_depth_mm >= 0.0)) throw std::invalid_argument("host.writing_depth_mm must be >= 0");
  if (compensation_gain_mm_per_mm && !(*compensation_gain_mm_per_mm >= 0.0))
    throw std::invalid_argument("host.compensation_gain_mm_per_mm must be >= 0");
  if (compensation_knee_mm && !(*compensation_knee_mm >= 0.0))
    throw std::invalid_argument("host.compensation_knee_mm must be >= 0");
}

namespace {

json axis_to_json(const AxisConfig& a) {
  return json{{"steps_per_rev", a.steps_per_rev},   {"lead_pitch_mm", a.lead_pitch_mm},
              {"travel_mm", a.travel_mm},           {"max_step_rate", a.max_step_rate},
              {"accel_steps_s2", a.accel_steps_s2}, {"homing_backoff_steps", a.homing_backoff_steps}};
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown config key " + where + "." + key);
  }
}

void axis_from_json(const json& j, AxisConfig& a, const std::string& where) {
  reject_unknown(j, {"steps_per_rev", "lead_pitch_mm", "travel_mm", "max_step_rate", "accel_steps_s2",
                     "homing_backoff_steps"},
                 where);
  take(j, "steps_per_rev", a.steps_per_rev);
  take(j, "lead_pitch_mm", a.lead_pitch_mm);
  take(j, "travel_mm", a.travel_mm);
  take(j, "max_step_rate", a.max_step_rate);
  take(j, "accel_steps_s2", a.accel_steps_s2);
  take(j, "homing_backoff_steps", a.homing_backoff_steps);
}

}  // namespace

json to_json(const Config& c) {
  const auto& m = c.machine;
  const auto& h = c.host;
  json host{{"chars_per_line", h.chars_per_line},
            {"letter_height_mm", h.letter_height_mm},
            {"line_spacing_mm", h.line_spacing_mm},
            {"lift_height_mm", h.lift_height_mm},
            {"writing_depth_mm", h.writing_depth_mm},
            {"compensation_enabled", h.compensation_enabled},
            {"strict_glyphs", h.strict_glyphs}};
  if (h.compensation_gain_mm_per_mm) host["compensation_gain_mm_per_mm"] = *h.compensation_gain_mm_per_mm;
  if (h.compensation_knee_mm) host["compensation_knee_mm"] = *h.compensation_knee_mm;
  return json{{"machine",
               {{"x", axis_to_json(m.axis(Axis::X))},
                {"y", axis_to_json(m.axis(Axis::Y))},
                {"z", axis_to_json(m.axis(Axis::Z))},
                {"flex_gain_mm_per_mm", m.flex_gain_mm_per_mm},
                {"flex_knee_mm", m.flex_knee_mm},
                {"buffer_capacity", m.buffer_capacity},
                {"xy_offset_steps", m.xy_offset_steps},
                {"paper_surface_z_mm", m.paper_surface_z_mm}}},
              {"host", host}};
}

Config config_from_json(const json& j) {
  Config c;
  reject_unknown(j, {"machine", "host"}, "config");
  if (j.contains("machine")) {
    const auto& m = j.at("machine");
    reject_unknown(m,
                   {"x", "y", "z", "flex_gain_mm_per_mm", "flex_knee_mm", "buffer_capacity", "xy_offset_steps",
                    "paper_surface_z_mm"},
                   "machine");
    if (m.contains("x")) axis_from_json(m.at("x"), c.machine.axis(Axis::X), "machine.x");
    if (m.contains("y")) axis_from_json(m.at("y"), c.machine.axis(Axis::Y), "machine.y");
    if (m.contains("z")) axis_from_json(m.at("z"), c.machine.axis(Axis::Z), "machine.z");
    take(m, "flex_gain_mm_per_mm", c.machine.flex_gain_mm_per_mm);
    take(m, "flex_knee_mm", c.machine.flex_knee_mm);
    take(m, "buffer_capacity", c.machine.buffer_capacity);
    take(m, "xy_offset_steps", c.machine.xy_offset_steps);
    take(m, "paper_surface_z_mm", c.machine.paper_surface_z_mm);
  }
  if (j.contains("host")) {
    const auto& h = j.at("host");
    reject_unknown(h,
                   {"chars_per_line", "letter_height_mm", "line_spacing_mm", "lift_height_mm", "writing_depth_mm",
                    "compensation_enabled", "compensation_gain_mm_per_mm", "compensation_knee_mm", "strict_glyphs"},
                   "host");
    take(h, "chars_per_line", c.host.chars_per_line);
    take(h, "letter_height_mm", c.host.letter_height_mm);
    take(h, "line_spacing_mm", c.host.line_spacing_mm);
    take(h, "lift_height_mm", c.host.lift_height_mm);
    take(h, "writing_depth_mm", c.host.writing_depth_mm);
    take(h, "compensation_enabled", c.host.compensation_enabled);
    take(h, "strict_glyphs", c.host.strict_glyphs);
    if (h.contains("compensation_gain_mm_per_mm"))
      c.host.compensation_gain_mm_per_mm = h.at("compensation_gain_mm_per_mm").get<double>();
    if (h.contains("compensation_knee_mm")) c.host.compensation_knee_mm = h.at("compensation_knee_mm").get<double>();
  }
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

Config resolve_config(const std::optional<std::string>& flag_path) {
  if (flag_path) return load_config(*flag_path);
  if (const char* env = std::getenv("SCRIBE_CONFIG"); env && *env) return load_config(env);
  Config c;
  c.validate();
  return c;
}

}  // namespace scribe
