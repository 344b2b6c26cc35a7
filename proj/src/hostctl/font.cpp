#include "scribe/hostctl/font.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace scribe::hostctl {

extern const char* const kBuiltinFontData;  // generated from data/fonts/

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw FontError("font line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(line_no, "bad number '" + std::string(s) + "'");
  return v;
}

char32_t parse_codepoint(std::string_view s, std::size_t line_no) {
  if (s.size() < 3 || s.substr(0, 2) != "U+") fail(line_no, "expected U+XXXX, got '" + std::string(s) + "'");
  unsigned long cp = 0;
  const auto digits = s.substr(2);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, 16);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || cp > 0x10FFFF)
    fail(line_no, "bad code point '" + std::string(s) + "'");
  return static_cast<char32_t>(cp);
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

Font Font::parse(std::string_view text) {
  Font font;
  Glyph* current = nullptr;
  std::optional<char32_t> placeholder;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto w = words(line);
    if (w.empty()) continue;

    const auto key = w[0];
    if (key == "name") {
      if (w.size() < 2) fail(line_no, "name needs a value");
      font.name_ = std::string(w[1]);
    } else if (key == "em" || key == "baseline") {
      if (w.size() != 2) fail(line_no, std::string(key) + " needs one value");
      (key == "em" ? font.em_ : font.baseline_) = parse_number(w[1], line_no);
    } else if (key == "placeholder") {
      if (w.size() != 2) fail(line_no, "placeholder needs a code point");
      placeholder = parse_codepoint(w[1], line_no);
    } else if (key == "glyph") {
      if (w.size() != 4 || w[2] != "advance") fail(line_no, "expected: glyph U+XXXX advance <n>");
      const char32_t cp = parse_codepoint(w[1], line_no);
      Glyph g;
      g.advance = parse_number(w[3], line_no);
      if (!(g.advance > 0.0)) fail(line_no, "advance must be > 0");
      auto [it, inserted] = font.glyphs_.emplace(cp, std::move(g));
      if (!inserted) fail(line_no, "duplicate glyph " + std::string(w[1]));
      current = &it->second;
    } else if (key == "stroke") {
      if (!current) fail(line_no, "stroke before any glyph");
      Polyline stroke;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const auto comma = w[i].find(',');
        if (comma == std::string_view::npos) fail(line_no, "expected x,y");
        Point2 p{parse_number(w[i].substr(0, comma), line_no), parse_number(w[i].substr(comma + 1), line_no)};
        if (p.y < 0.0 || (font.em_ > 0.0 && p.y > font.em_)) fail(line_no, "point outside the line box");
        if (!stroke.empty() && stroke.back() == p) fail(line_no, "consecutive duplicate point");
        stroke.push_back(p);
      }
      if (stroke.size() < 2) fail(line_no, "a stroke needs at least two points");
      current->strokes.push_back(std::move(stroke));
    } else {
      fail(line_no, "unknown directive '" + std::string(key) + "'");
    }
  }
  if (!(font.em_ > 0.0)) throw FontError("font: missing or non-positive em");
  if (placeholder) {
    if (!font.glyphs_.count(*placeholder)) throw FontError("font: placeholder glyph not defined");
    font.placeholder_ = placeholder;
  }
  return font;
}

Font Font::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FontError("cannot open font file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Font& Font::builtin() {
  static const Font font = parse(kBuiltinFontData);
  return font;
}

const Glyph* Font::find(char32_t cp) const {
  const auto it = glyphs_.find(cp);
  return it == glyphs_.end() ? nullptr : &it->second;
}

}  // namespace scribe::hostctl
