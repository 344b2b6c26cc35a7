#include "scribe/hostctl/pipeline.hpp"

#include <algorithm>

#include "scribe/hostctl/text.hpp"

namespace scribe::hostctl {

Compensation Compensation::from(const Config& config) {
  return Compensation{config.host.compensation_enabled,
                      config.host.compensation_gain_mm_per_mm.value_or(config.machine.flex_gain_mm_per_mm),
                      config.host.compensation_knee_mm.value_or(config.machine.flex_knee_mm)};
}

std::vector<Stroke> layout_lines(const std::vector<std::string>& lines, const StrokeGenerator& gen,
                                 const HostConfig& host, std::vector<std::string>* warnings) {
  StrokeStyle style{host.letter_height_mm, host.strict_glyphs};
  std::vector<Stroke> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto generated = generate_strokes(lines[i], gen, style);
    const double dy = static_cast<double>(i) * host.line_spacing_mm;
    for (auto& s : generated.strokes) {
      for (auto& p : s.points) p.y += dy;
      out.push_back(std::move(s));
    }
    if (warnings) warnings->insert(warnings->end(), generated.warnings.begin(), generated.warnings.end());
  }
  return out;
}

Point2 paper_to_machine_mm(Point2 p, const MachineConfig& config) {
  return {p.x + steps_to_mm(config.xy_offset_steps[0], Axis::X, config),
          p.y + steps_to_mm(config.xy_offset_steps[1], Axis::Y, config)};
}

std::vector<StepStroke> transform_coordinates(const std::vector<Stroke>& strokes, const MachineConfig& config) {
  const Steps max_x = config.travel_steps(Axis::X);
  const Steps max_y = config.travel_steps(Axis::Y);
  std::vector<StepStroke> out;
  out.reserve(strokes.size());
  for (const auto& stroke : strokes) {
    StepStroke s;
    for (const Point2 p : stroke.points) {
      const StepPoint q{mm_to_steps(p.x, Axis::X, config) + config.xy_offset_steps[0],
                        mm_to_steps(p.y, Axis::Y, config) + config.xy_offset_steps[1]};
      if (q.x < 0 || q.x > max_x || q.y < 0 || q.y > max_y) {
        throw OutOfWorkArea("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") mm maps to (" +
                            std::to_string(q.x) + ", " + std::to_string(q.y) + ") steps, outside the work area");
      }
      if (s.points.empty() || s.points.back() != q) s.points.push_back(q);
    }
    if (!s.points.empty()) out.push_back(std::move(s));
  }
  return out;
}

Steps z_compensation(Steps x_steps, Steps /*y_steps*/, const MachineConfig& config, const Compensation& comp) {
  if (!comp.enabled) return 0;
  const double d = steps_to_mm(x_steps, Axis::X, config);
  return mm_to_steps(comp.gain * std::max(0.0, d - comp.knee_mm), Axis::Z, config);
}

Steps lifted_z(const MachineConfig& config, const HostConfig& host) {
  return mm_to_steps(config.paper_surface_z_mm - host.lift_height_mm, Axis::Z, config);
}

Steps writing_z(const MachineConfig& config, const HostConfig& host) {
  return mm_to_steps(config.paper_surface_z_mm + host.writing_depth_mm, Axis::Z, config);
}

std::vector<TargetPoint> insert_pen_transitions(const std::vector<StepStroke>& strokes, const MachineConfig& config,
                                                const HostConfig& host, const Compensation& comp) {
  const Steps up = lifted_z(config, host);
  const Steps down = writing_z(config, host);
  const Steps max_z = config.travel_steps(Axis::Z);
  if (up < 0) throw OutOfWorkArea("lift height leaves the Z travel");

  std::vector<TargetPoint> out;
  for (const auto& stroke : strokes) {
    if (stroke.points.empty()) continue;
    const auto& first = stroke.points.front();
    const auto& last = stroke.points.back();
    out.push_back({first.x, first.y, up, PenState::Travel});
    for (const auto& p : stroke.points) {
      const Steps z = down + z_compensation(p.x, p.y, config, comp);
      if (z > max_z) throw OutOfWorkArea("compensated pen depth exceeds the Z travel");
      out.push_back({p.x, p.y, z, PenState::Draw});
    }
    out.push_back({last.x, last.y, up, PenState::Travel});
  }
  return out;
}

JobPlan plan_job(std::string_view text, const StrokeGenerator& gen, const Config& config) {
  JobPlan plan;
  plan.lines = segment_text(text, config.host.chars_per_line);
  plan.paper_strokes = layout_lines(plan.lines, gen, config.host, &plan.warnings);
  for (const auto& s : plan.paper_strokes) {
    Polyline ref;
    ref.reserve(s.points.size());
    for (const Point2 p : s.points) ref.push_back(paper_to_machine_mm(p, config.machine));
    plan.reference.push_back(std::move(ref));
  }
  plan.step_strokes = transform_coordinates(plan.paper_strokes, config.machine);
  plan.targets = insert_pen_transitions(plan.step_strokes, config.machine, config.host, Compensation::from(config));
  return plan;
}

}  // namespace scribe::hostctl
