#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace bubblesim {

using Cents = std::int64_t;
using Shares = std::int64_t;
using AgentId = std::uint32_t;
using OrderId = std::uint64_t;

inline constexpr AgentId kNoAgent = std::numeric_limits<AgentId>::max();

// Nanoseconds since market open. Also used for durations.
struct SimTime {
  std::int64_t nanos{0};

  static constexpr SimTime from_nanos(std::int64_t ns) { return SimTime{ns}; }
  static constexpr SimTime from_micros(std::int64_t us) { return SimTime{us * 1'000}; }
  static constexpr SimTime from_seconds(std::int64_t s) { return SimTime{s * 1'000'000'000}; }

  constexpr std::int64_t whole_seconds() const { return nanos / 1'000'000'000; }
  constexpr double seconds() const { return static_cast<double>(nanos) * 1e-9; }

  friend constexpr auto operator<=>(SimTime, SimTime) = default;
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.nanos + b.nanos}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.nanos - b.nanos}; }
};

enum class Side : std::uint8_t { buy, sell };
enum class OrderType : std::uint8_t { limit, market };

constexpr Side opposite(Side s) { return s == Side::buy ? Side::sell : Side::buy; }
constexpr const char* to_string(Side s) { return s == Side::buy ? "buy" : "sell"; }

}  // namespace bubblesim
