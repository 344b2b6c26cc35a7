// Host <-> firmware line protocol. See docs/protocol.md for the byte format.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scribe/machine_model.hpp"

namespace scribe::protocol {

struct Home {
  bool operator==(const Home&) const = default;
};

struct Move {
  Steps x = 0;
  Steps y = 0;
  Steps z = 0;
  bool operator==(const Move&) const = default;
};

using Command = std::variant<Home, Move>;

struct Ready {
  std::uint32_t free_slots = 0;
  bool operator==(const Ready&) const = default;
};

struct Homed {
  bool operator==(const Homed&) const = default;
};

struct MoveDone {
  std::uint32_t free_slots = 0;
  bool operator==(const MoveDone&) const = default;
};

// Error codes are upper-case tokens ([A-Z0-9_]+); the message is printable
// ASCII without line breaks.
struct Error {
  std::string code;
  std::string message;
  bool operator==(const Error&) const = default;
};

using Feedback = std::variant<Ready, Homed, MoveDone, Error>;

namespace codes {
inline constexpr std::string_view kQueueFull = "QUEUE_FULL";
inline constexpr std::string_view kOutOfBounds = "OUT_OF_BOUNDS";
inline constexpr std::string_view kNotHomed = "NOT_HOMED";
inline constexpr std::string_view kMalformed = "MALFORMED";
inline constexpr std::string_view kLimit = "LIMIT";
inline constexpr std::string_view kHomingTimeout = "HOMING_TIMEOUT";
inline constexpr std::string_view kFault = "FAULT";
}  // namespace codes

inline constexpr std::size_t kMaxLineBytes = 256;

/// Either a decoded value or the reason decoding failed.
template <typename T>
struct Parsed {
  std::optional<T> value;
  std::string error;

  static Parsed ok(T v) { return Parsed{std::move(v), {}}; }
  static Parsed fail(std::string why) { return Parsed{std::nullopt, std::move(why)}; }

  explicit operator bool() const { return value.has_value(); }
};

std::string encode_command(const Command& cmd);
/// Accepts one line without its '\n'; a single trailing '\r' is tolerated.
Parsed<Command> parse_command(std::string_view line);

std::string encode_feedback(const Feedback& fb);
Parsed<Feedback> parse_feedback(std::string_view line);

bool is_valid_error_code(std::string_view code);
bool is_valid_error_message(std::string_view message);

std::string describe(const Command& cmd);
std::string describe(const Feedback& fb);

/// One unit produced by the framer: a complete line, or notice that an
/// unterminated line exceeded kMaxLineBytes and was discarded.
struct Frame {
  std::string line;
  bool overflow = false;
  bool operator==(const Frame&) const = default;
};

/// Reassembles '\n'-terminated lines from an arbitrarily chunked byte stream.
/// One framer per transport direction.
class LineFramer {
 public:
  std::vector<Frame> feed(std::string_view bytes);

  const std::string& residue() const { return residue_; }
  bool discarding() const { return discarding_; }

  bool operator==(const LineFramer&) const = default;

 private:
  std::string residue_;
  bool discarding_ = false;
};

struct SplitResult {
  std::vector<Frame> frames;
  std::string residue;
};

/// Single-shot split of a byte buffer.
SplitResult frame_split(std::string_view stream);

}  // namespace scribe::protocol
