// Single-stroke vector font. File format: docs/font-format.md.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/geometry.hpp"

namespace scribe::hostctl {

struct Glyph {
  double advance = 0.0;  // em units
  std::vector<Polyline> strokes;
};

class FontError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Font {
 public:
  static Font parse(std::string_view text);
  static Font load(const std::string& path);

  /// The font shipped with the library.
  static const Font& builtin();

  const std::string& name() const { return name_; }
  /// Height of the line box (descender to ascender) in font units; y grows upward.
  double em() const { return em_; }
  double baseline() const { return baseline_; }

  const Glyph* find(char32_t cp) const;
  std::optional<char32_t> placeholder() const { return placeholder_; }
  std::size_t size() const { return glyphs_.size(); }
  const std::map<char32_t, Glyph>& glyphs() const { return glyphs_; }

 private:
  std::string name_;
  double em_ = 0.0;
  double baseline_ = 0.0;
  std::map<char32_t, Glyph> glyphs_;
  std::optional<char32_t> placeholder_;
};

}  // namespace scribe::hostctl
