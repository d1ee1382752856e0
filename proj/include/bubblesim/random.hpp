#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace bubblesim {

/// Counter-based random stream (SplitMix64 output function over key + counter).
///
/// Streams are cheap values: a stream is fully described by its key and
/// position, so any named sub-stream can be derived from a master seed without
/// touching the state of any other stream. All distributions are implemented
/// here so that a seed reproduces the same draws on every standard library.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  constexpr RandomStream() = default;
  constexpr explicit RandomStream(std::uint64_t key) : key_(mix(key)) {}

  /// Independent child stream identified by (name, index).
  RandomStream derive(std::string_view name, std::uint64_t index = 0) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  double normal();
  double exponential(double mean);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_{0};
  std::uint64_t counter_{0};
  double spare_normal_{0.0};
  bool has_spare_{false};
};

/// 64-bit FNV-1a, used for stream names and trace hashes.
constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bubblesim
