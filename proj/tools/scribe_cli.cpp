// scribe: drive the virtual handwriting machine from the command line.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scribe/config.hpp"
#include "scribe/evaluation.hpp"
#include "scribe/hostctl/strokes.hpp"
#include "scribe/service.hpp"
#include "scribe/simulation.hpp"

#ifndef SCRIBE_DATA_DIR
#define SCRIBE_DATA_DIR "data"
#endif

namespace {

using namespace scribe;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fmt_opt(const std::optional<double>& v, int digits) {
  if (!v) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

struct WriteArgs {
  std::string text;
  std::string text_file;
  std::string out;
  std::string report;
  std::string trace_csv;
  std::string reference_out;
  bool strict = false;
  bool no_compensation = false;
  std::optional<std::size_t> chars_per_line;
};

int cmd_write(const WriteArgs& a, const std::optional<std::string>& config_path) {
  Config config = resolve_config(config_path);
  if (a.strict) config.host.strict_glyphs = true;
  if (a.no_compensation) config.host.compensation_enabled = false;
  if (a.chars_per_line) config.host.chars_per_line = *a.chars_per_line;
  config.validate();

  const std::string text = a.text_file.empty() ? a.text : read_file(a.text_file);
  hostctl::VectorFontGenerator gen;
  VirtualLink link(config.machine);
  const auto result = run_write_job(text, config, gen, link);

  for (const auto& w : result.plan.warnings) std::cerr << "warning: " << w << "\n";
  if (!a.out.empty()) write_file(a.out, result.svg);
  if (!a.trace_csv.empty()) write_file(a.trace_csv, trace_to_csv(result.trace));
  if (!a.reference_out.empty()) write_file(a.reference_out, reference_to_text(result.plan.reference));
  if (!a.report.empty()) {
    nlohmann::json j = {{"report", to_json(result.report)}, {"measurements", to_json(result.measurements)}};
    write_file(a.report, j.dump(2) + "\n");
  }

  std::cout << "outcome: " << hostctl::outcome_name(result.report.outcome) << "\n"
            << "lines: " << result.plan.lines.size() << "\n"
            << "points: " << result.report.points_done << "/" << result.report.points_total << "\n"
            << "duration: " << fmt_opt(result.report.duration_s, 3) << " s\n"
            << "max deviation: " << fmt_opt(result.measurements.max_deviation_mm, 4) << " mm\n"
            << "writing speed: " << fmt_opt(result.measurements.writing_speed_mm_min, 1) << " mm/min\n"
            << "max depth error: " << fmt_opt(result.measurements.max_depth_error_mm, 4) << " mm\n";
  for (const auto& e : result.report.errors) std::cerr << "error: " << e << "\n";
  return result.ok() ? 0 : 1;
}

int cmd_home(const std::optional<std::string>& config_path, const std::vector<Steps>& start,
             const std::vector<std::string>& disconnected) {
  const Config config = resolve_config(config_path);
  std::optional<StepPosition> physical;
  if (!start.empty()) physical = StepPosition{start[0], start[1], start[2]};
  VirtualLink link(config.machine, physical);
  for (const auto& name : disconnected) {
    if (name == "x") link.machine().set_switch_connected(Axis::X, false);
    if (name == "y") link.machine().set_switch_connected(Axis::Y, false);
    if (name == "z") link.machine().set_switch_connected(Axis::Z, false);
  }
  const auto report = hostctl::home_machine(link);
  const auto& phys = link.machine().physical();
  if (!report.ok) {
    std::cerr << "error: homing failed: " << report.error << "\n";
    return 1;
  }
  std::cout << "homed in " << fmt_opt(report.duration_s, 3) << " s\n"
            << "physical position: " << to_string(phys) << "\n"
            << "logical position: " << to_string(link.state().position) << "\n"
            << "free slots: " << report.free_slots << "\n";
  return 0;
}

int cmd_eval(const std::string& reference_path, const std::string& trace_path, const std::string& svg_out) {
  const auto reference = reference_from_text(read_file(reference_path));
  const auto trace = trace_from_csv(read_file(trace_path));
  std::cout << "max deviation: " << fmt_opt(evaluation::max_deviation(reference, trace), 4) << " mm\n";
  try {
    std::cout << "writing speed: " << fmt_opt(evaluation::writing_speed(trace), 1) << " mm/min\n";
  } catch (const evaluation::NoDrawSegments&) {
    std::cout << "writing speed: n/a\n";
  }
  if (!svg_out.empty()) write_file(svg_out, evaluation::render_svg(reference, trace));
  return 0;
}

int cmd_bom(const std::string& file, bool total_only) {
  const auto items = evaluation::load_bom(file);
  if (total_only) {
    std::cout << evaluation::bom_total(items).str() << "\n";
  } else {
    std::cout << evaluation::format_bom_table(items);
  }
  return 0;
}

int cmd_serve(const std::optional<std::string>& config_path, const std::string& host, int port, double factor) {
  service::ServiceOptions options;
  options.config = resolve_config(config_path);
  options.realtime_factor = factor;

  // Block the stop signals before any thread exists so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Service svc(options);
  const int bound = svc.start(host, port);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  svc.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual pen-plotter handwriting machine"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file (default: $SCRIBE_CONFIG)");

  WriteArgs w;
  auto* write = app.add_subcommand("write", "Write text on the virtual machine");
  auto* text_opt = write->add_option("--text", w.text, "Text to write");
  auto* file_opt = write->add_option("--text-file", w.text_file, "Read the text from a file");
  text_opt->excludes(file_opt);
  write->add_option("--out", w.out, "SVG overlay output");
  write->add_option("--report", w.report, "JSON report output");
  write->add_option("--trace-csv", w.trace_csv, "Pen trace CSV output");
  write->add_option("--reference-out", w.reference_out, "Reference polylines output");
  write->add_flag("--strict", w.strict, "Fail on characters missing from the font");
  write->add_flag("--no-compensation", w.no_compensation, "Disable Z flex compensation");
  write->add_option("--chars-per-line", w.chars_per_line, "Line length in characters")->check(CLI::PositiveNumber);

  std::vector<Steps> start;
  std::vector<std::string> disconnected;
  auto* home = app.add_subcommand("home", "Home a fresh virtual machine");
  home->add_option("--start", start, "Physical start position in steps: X Y Z")->expected(3);
  home->add_option("--disconnect", disconnected, "Axes whose limit switch is unplugged")
      ->check(CLI::IsMember({"x", "y", "z"}));

  std::string reference_path, trace_path, eval_svg;
  auto* eval = app.add_subcommand("eval", "Measure a recorded trace against a reference");
  eval->add_option("--reference", reference_path, "Reference polylines file")->required();
  eval->add_option("--trace", trace_path, "Trace CSV file")->required();
  eval->add_option("--out", eval_svg, "SVG overlay output");

  std::string bom_file = std::string(SCRIBE_DATA_DIR) + "/bom.csv";
  bool total_only = false;
  auto* bom = app.add_subcommand("bom", "Print the bill of materials");
  bom->add_option("--file", bom_file, "BOM CSV file");
  bom->add_flag("--total", total_only, "Print only the total");

  std::string host = "127.0.0.1";
  int port = 8080;
  double factor = 1.0;
  auto* serve = app.add_subcommand("serve", "Serve the live machine over HTTP");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--realtime-factor", factor, "Simulated seconds per wall second (0 = unpaced)")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*write) {
      if (w.text.empty() && w.text_file.empty()) throw CLI::RequiredError("--text or --text-file");
      return cmd_write(w, config_path);
    }
    if (*home) return cmd_home(config_path, start, disconnected);
    if (*eval) return cmd_eval(reference_path, trace_path, eval_svg);
    if (*bom) return cmd_bom(bom_file, total_only);
    if (*serve) return cmd_serve(config_path, host, port, factor);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
