#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace bdmpl {

// Random streams built on SplitMix64 (Steele, Lea & Flood 2014).
//
// A stream is identified by a 64-bit key. The i-th output is
//   mix64(key + (i + 1) * 0x9e3779b97f4a7c15)
// so every value is a pure function of (key, i) and is identical on every
// platform. Substreams derive a new key from the parent key and either an
// integer index or a name, which gives one root seed with independent named
// streams ("simulate", "sample", "tie-break", ...) and per-iteration
// substreams inside them.
//
// The distributions in <random> are implementation-defined, so the few
// variates needed here are derived directly from the raw bits.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RandomStream {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit RandomStream(std::uint64_t key = 0) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t position() const { return counter_; }

  constexpr result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double prob) { return uniform() < prob; }

  constexpr RandomStream substream(std::uint64_t index) const {
    return RandomStream(mix64(key_ ^ mix64(index + kGamma)));
  }

  constexpr RandomStream substream(std::string_view name) const {
    return RandomStream(mix64(key_ + mix64(fnv1a64(name))));
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline RandomStream root_stream(std::uint64_t seed) { return RandomStream(mix64(seed)); }

}  // namespace bdmpl
