#include "scribe/hostctl/strokes.hpp"

#include <cstdio>

#include "scribe/hostctl/text.hpp"

namespace scribe::hostctl {
namespace {

std::string codepoint_label(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

}  // namespace

UnsupportedGlyph::UnsupportedGlyph(char32_t cp)
    : std::runtime_error("unsupported glyph " + codepoint_label(cp) + " '" + encode_utf8(cp) + "'"), cp_(cp) {}

GeneratedLine VectorFontGenerator::generate(std::string_view line, const StrokeStyle& style) const {
  GeneratedLine out;
  const double scale = style.letter_height_mm / font_->em();
  const double top = font_->em();
  double pen_x = 0.0;
  for (char32_t cp : decode_utf8(line)) {
    const Glyph* glyph = font_->find(cp);
    if (!glyph) {
      if (style.strict || !font_->placeholder()) throw UnsupportedGlyph(cp);
      out.warnings.push_back(UnsupportedGlyph(cp).what() + std::string(", drawn as placeholder"));
      glyph = font_->find(*font_->placeholder());
    }
    for (const auto& poly : glyph->strokes) {
      Stroke s;
      s.points.reserve(poly.size());
      for (const Point2 p : poly) s.points.push_back({pen_x + p.x * scale, (top - p.y) * scale});
      out.strokes.push_back(std::move(s));
    }
    pen_x += glyph->advance * scale;
  }
  out.width_mm = pen_x;
  return out;
}

GeneratedLine generate_strokes(std::string_view line, const StrokeGenerator& gen, const StrokeStyle& style) {
  if (line.empty()) throw std::invalid_argument("generate_strokes: empty line");
  if (!(style.letter_height_mm > 0.0)) throw std::invalid_argument("letter height must be > 0");
  auto out = gen.generate(line, style);
  for (const auto& s : out.strokes) {
    if (s.points.size() < 2) throw std::logic_error(gen.name() + ": stroke with fewer than two points");
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      if (s.points[i] == s.points[i - 1]) throw std::logic_error(gen.name() + ": consecutive duplicate point");
    }
    for (const Point2 p : s.points) {
      if (p.y < -1e-9 || p.y > style.letter_height_mm + 1e-9)
        throw std::logic_error(gen.name() + ": stroke leaves the line box");
    }
  }
  return out;
}

}  // namespace scribe::hostctl
