#pragma once

#include <cstdint>

namespace neurogame {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Purpose tags folded into stream keys so that different estimators never
// share random numbers.
enum class StreamKind : std::uint64_t {
  shapley = 1,
  banzhaf = 2,
  interaction = 3,
  head = 4,
  synthetic = 5,
};

__extension__ typedef unsigned __int128 uint128_t;

inline constexpr std::uint64_t kNoIndex = ~std::uint64_t{0};

// Key for the stream identified by (seed, kind, a, b).
constexpr std::uint64_t derive_stream_key(std::uint64_t seed, StreamKind kind,
                                          std::uint64_t a = kNoIndex,
                                          std::uint64_t b = kNoIndex) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ static_cast<std::uint64_t>(kind));
  k = mix64(k ^ a);
  k = mix64(k ^ (b * 0xd1b54a32d192ed03ULL));
  return k;
}

// Counter-based generator: draw c of stream `key` is mix64(key + c * phi),
// so any stream is reproducible from its key alone, independent of which
// thread consumes it or in what order streams are created.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next() {
    return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  }

  // Uniform integer in [0, bound); bound > 0. Lemire's multiply-shift with
  // rejection, so the result is unbiased and platform independent.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = next();
    uint128_t m = static_cast<uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace neurogame
