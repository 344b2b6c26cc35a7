#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/geometry.hpp"
#include "scribe/hostctl/font.hpp"

namespace scribe::hostctl {

/// One continuous pen-down path in millimetres: at least two points, no
/// consecutive duplicates.
struct Stroke {
  Polyline points;
  bool operator==(const Stroke&) const = default;
};

struct StrokeStyle {
  double letter_height_mm = 8.0;
  // Throw UnsupportedGlyph instead of substituting the placeholder.
  bool strict = false;
};

/// Output strokes lie in the line box x >= 0, 0 <= y <= letter height, with
/// y growing down the page.
struct GeneratedLine {
  std::vector<Stroke> strokes;
  double width_mm = 0.0;
  std::vector<std::string> warnings;
};

class UnsupportedGlyph : public std::runtime_error {
 public:
  explicit UnsupportedGlyph(char32_t cp);
  char32_t codepoint() const { return cp_; }

 private:
  char32_t cp_;
};

/// Source of pen trajectories for a line of text. A learned handwriting
/// model would implement this; the bundled implementation draws from a
/// single-stroke vector font.
class StrokeGenerator {
 public:
  virtual ~StrokeGenerator() = default;
  virtual std::string name() const = 0;
  virtual GeneratedLine generate(std::string_view line, const StrokeStyle& style) const = 0;
};

class VectorFontGenerator final : public StrokeGenerator {
 public:
  explicit VectorFontGenerator(const Font& font = Font::builtin()) : font_(&font) {}

  std::string name() const override { return "vector-font:" + font_->name(); }
  GeneratedLine generate(std::string_view line, const StrokeStyle& style) const override;

 private:
  const Font* font_;
};

/// Validating front door over a generator; `line` must be non-empty.
GeneratedLine generate_strokes(std::string_view line, const StrokeGenerator& gen, const StrokeStyle& style);

}  // namespace scribe::hostctl
