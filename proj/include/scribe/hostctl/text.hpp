#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace scribe::hostctl {

/// Greedy word wrap. Words are separated by whitespace and rejoined with
/// single spaces; a word longer than `chars_per_line` is hard-split at the
/// limit. Lengths count UTF-8 code points.
std::vector<std::string> segment_text(std::string_view text, std::size_t chars_per_line);

/// Decodes UTF-8, substituting U+FFFD for invalid sequences.
std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(char32_t cp);

}  // namespace scribe::hostctl
