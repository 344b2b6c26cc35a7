#include "scribe/protocol.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace scribe::protocol {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(' ', start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Strict decimal: optional '-', at least one digit, nothing else.
template <typename Int>
std::optional<std::string> parse_int(std::string_view text, Int& out) {
  if (text.empty()) return "empty number";
  std::string_view digits = text.front() == '-' ? text.substr(1) : text;
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), is_digit))
    return "not an integer: '" + std::string(text) + "'";
  // Only the canonical spelling is accepted: no leading zeros, no "-0".
  if (digits.size() > 1 && digits.front() == '0') return "non-canonical integer: '" + std::string(text) + "'";
  if (text == "-0") return "non-canonical integer: '-0'";
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec == std::errc::result_out_of_range) return "integer overflow: '" + std::string(text) + "'";
  if (ec != std::errc{} || ptr != text.data() + text.size())
    return "not an integer: '" + std::string(text) + "'";
  return std::nullopt;
}

std::string printable(std::string_view s) {
  std::string out;
  for (char c : s.substr(0, 40)) {
    out += (c >= 0x20 && c < 0x7f) ? c : '?';
  }
  if (s.size() > 40) out += "...";
  return out;
}

Parsed<std::uint32_t> parse_slots(std::string_view field) {
  if (field.substr(0, 2) != "N:") return Parsed<std::uint32_t>::fail("expected N:<free_slots>");
  const auto digits = field.substr(2);
  if (!digits.empty() && digits.front() == '-') return Parsed<std::uint32_t>::fail("negative free_slots");
  std::uint32_t n = 0;
  if (auto err = parse_int(digits, n)) return Parsed<std::uint32_t>::fail(*err);
  return Parsed<std::uint32_t>::ok(n);
}

}  // namespace

std::string encode_command(const Command& cmd) {
  return std::visit(overloaded{
                        [](const Home&) { return std::string("HOME\n"); },
                        [](const Move& m) {
                          return "MOVE X:" + std::to_string(m.x) + " Y:" + std::to_string(m.y) +
                                 " Z:" + std::to_string(m.z) + "\n";
                        },
                    },
                    cmd);
}

Parsed<Command> parse_command(std::string_view raw) {
  using R = Parsed<Command>;
  const auto line = strip_cr(raw);
  if (line.find_first_of("\r\n") != std::string_view::npos) return R::fail("embedded line break");
  if (line == "HOME") return R::ok(Home{});

  const auto tokens = split_spaces(line);
  if (tokens.front() != "MOVE") return R::fail("unknown keyword '" + printable(tokens.front()) + "'");

  std::array<std::optional<Steps>, 3> fields{};
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto tok = tokens[i];
    if (tok.size() < 2 || tok[1] != ':') return R::fail("bad field '" + printable(tok) + "'");
    std::size_t slot = 0;
    switch (tok[0]) {
      case 'X': slot = 0; break;
      case 'Y': slot = 1; break;
      case 'Z': slot = 2; break;
      default: return R::fail("unknown field '" + printable(tok) + "'");
    }
    if (fields[slot]) return R::fail(std::string("duplicate field ") + tok[0]);
    if (slot != i - 1) return R::fail("fields out of order (expected X Y Z)");
    Steps v = 0;
    if (auto err = parse_int(tok.substr(2), v)) return R::fail(*err);
    fields[slot] = v;
  }
  static constexpr std::array<char, 3> kNames = {'X', 'Y', 'Z'};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!fields[i]) return R::fail(std::string("missing field ") + kNames[i]);
  }
  return R::ok(Move{*fields[0], *fields[1], *fields[2]});
}

bool is_valid_error_code(std::string_view code) {
  return !code.empty() && std::all_of(code.begin(), code.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || is_digit(c) || c == '_';
  });
}

bool is_valid_error_message(std::string_view message) {
  return std::all_of(message.begin(), message.end(), [](char c) { return c >= 0x20 && c < 0x7f; });
}

std::string encode_feedback(const Feedback& fb) {
  return std::visit(overloaded{
                        [](const Ready& r) { return "READY N:" + std::to_string(r.free_slots) + "\n"; },
                        [](const Homed&) { return std::string("HOMED\n"); },
                        [](const MoveDone& d) { return "DONE N:" + std::to_string(d.free_slots) + "\n"; },
                        [](const Error& e) {
                          std::string out = "ERR " + e.code;
                          if (!e.message.empty()) out += " " + e.message;
                          return out + "\n";
                        },
                    },
                    fb);
}

Parsed<Feedback> parse_feedback(std::string_view raw) {
  using R = Parsed<Feedback>;
  const auto line = strip_cr(raw);
  if (line == "HOMED") return R::ok(Homed{});

  const auto space = line.find(' ');
  const auto keyword = line.substr(0, space);
  if (space == std::string_view::npos) return R::fail("unknown feedback '" + printable(line) + "'");
  const auto rest = line.substr(space + 1);

  if (keyword == "READY" || keyword == "DONE") {
    auto slots = parse_slots(rest);
    if (!slots) return R::fail(slots.error);
    if (keyword == "READY") return R::ok(Ready{*slots.value});
    return R::ok(MoveDone{*slots.value});
  }
  if (keyword == "ERR") {
    const auto sp = rest.find(' ');
    const auto code = rest.substr(0, sp);
    const auto message = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
    if (!is_valid_error_code(code)) return R::fail("bad error code '" + printable(code) + "'");
    // "ERR CODE " with an empty message is not in the encoder's image.
    if (sp != std::string_view::npos && message.empty()) return R::fail("empty error message");
    if (!is_valid_error_message(message)) return R::fail("control character in error message");
    return R::ok(Error{std::string(code), std::string(message)});
  }
  return R::fail("unknown feedback '" + printable(keyword) + "'");
}

std::string describe(const Command& cmd) {
  auto s = encode_command(cmd);
  s.pop_back();
  return s;
}

std::string describe(const Feedback& fb) {
  auto s = encode_feedback(fb);
  s.pop_back();
  return s;
}

std::vector<Frame> LineFramer::feed(std::string_view bytes) {
  std::vector<Frame> out;
  while (!bytes.empty()) {
    const auto nl = bytes.find('\n');
    const auto chunk = bytes.substr(0, nl);
    if (discarding_) {
      if (nl != std::string_view::npos) discarding_ = false;
    } else if (residue_.size() + chunk.size() > kMaxLineBytes) {
      residue_.clear();
      out.push_back(Frame{{}, true});
      discarding_ = nl == std::string_view::npos;
    } else if (nl == std::string_view::npos) {
      residue_.append(chunk);
    } else {
      residue_.append(chunk);
      out.push_back(Frame{std::move(residue_), false});
      residue_.clear();
    }
    if (nl == std::string_view::npos) break;
    bytes.remove_prefix(nl + 1);
  }
  return out;
}

SplitResult frame_split(std::string_view stream) {
  LineFramer framer;
  auto frames = framer.feed(stream);
  return SplitResult{std::move(frames), framer.residue()};
}

}  // namespace scribe::protocol
