#include "scribe/hostctl/text.hpp"

#include <stdexcept>

namespace scribe::hostctl {

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

namespace {

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f'; }

std::string to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) out += encode_utf8(c);
  return out;
}

}  // namespace

std::vector<std::string> segment_text(std::string_view text, std::size_t chars_per_line) {
  if (chars_per_line == 0) throw std::invalid_argument("chars_per_line must be >= 1");

  // Tokenize into words, pre-splitting any word longer than a whole line.
  std::vector<std::u32string> pieces;
  std::u32string word;
  auto flush = [&] {
    for (std::size_t at = 0; at < word.size(); at += chars_per_line) {
      pieces.push_back(word.substr(at, chars_per_line));
    }
    word.clear();
  };
  for (char32_t c : decode_utf8(text)) {
    if (is_space(c)) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();

  std::vector<std::string> lines;
  std::u32string line;
  for (const auto& piece : pieces) {
    if (line.empty()) {
      line = piece;
    } else if (line.size() + 1 + piece.size() <= chars_per_line) {
      line += U' ';
      line += piece;
    } else {
      lines.push_back(to_utf8(line));
      line = piece;
    }
  }
  if (!line.empty()) lines.push_back(to_utf8(line));
  return lines;
}

}  // namespace scribe::hostctl
