// Seeded generators for property tests.
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "scribe/protocol.hpp"

namespace scribe::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(items.size()) - 1))];
  }
  std::mt19937_64& engine() { return engine_; }

  /// Integers biased toward edges: zero, small, and the int64 limits.
  std::int64_t interesting_int() {
    switch (integer(0, 5)) {
      case 0: return 0;
      case 1: return integer(-9, 9);
      case 2: return integer(-100000, 100000);
      case 3: return std::numeric_limits<std::int64_t>::max() - integer(0, 3);
      case 4: return std::numeric_limits<std::int64_t>::min() + integer(0, 3);
      default: return integer(std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max());
    }
  }

  std::string printable(std::size_t max_len) {
    std::string s(static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(max_len))), ' ');
    for (auto& c : s) c = static_cast<char>(integer(0x20, 0x7e));
    return s;
  }

  std::string token(std::size_t min_len, std::size_t max_len) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
    std::string s(static_cast<std::size_t>(integer(static_cast<std::int64_t>(min_len),
                                                   static_cast<std::int64_t>(max_len))), 'A');
    for (auto& c : s) c = alphabet[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(alphabet.size()) - 1))];
    return s;
  }

  protocol::Command command() {
    if (chance(0.1)) return protocol::Home{};
    return protocol::Move{interesting_int(), interesting_int(), interesting_int()};
  }

  protocol::Feedback feedback() {
    const auto slots = [&] {
      return static_cast<std::uint32_t>(chance(0.2) ? std::numeric_limits<std::uint32_t>::max() : integer(0, 64));
    };
    switch (integer(0, 3)) {
      case 0: return protocol::Ready{slots()};
      case 1: return protocol::Homed{};
      case 2: return protocol::MoveDone{slots()};
      default: {
        const std::string msg = chance(0.3) ? std::string() : printable(80);
        return protocol::Error{token(1, 16), msg};
      }
    }
  }

  /// Arbitrary bytes with a bias toward protocol-looking text.
  std::string line_bytes(std::size_t max_len) {
    static const std::vector<std::string> fragments = {"MOVE", "HOME", " X:", " Y:", " Z:", "-", "0", "9",
                                                       "READY", "DONE", " N:", "ERR ", "\r", " ", ":"};
    std::string s;
    const auto len = static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(max_len)));
    while (s.size() < len) {
      if (chance(0.5)) {
        s += pick(fragments);
      } else {
        s.push_back(static_cast<char>(integer(0, 255)));
      }
    }
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scribe::testing
