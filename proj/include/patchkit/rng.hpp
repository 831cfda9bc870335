#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace patchkit::rng {

// Counter-based randomness: every draw is a pure function of
// (seed, stream, key_a, key_b). Values never depend on iteration order,
// so sparse and dense sampling of the same objects agree bit for bit.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

enum class Stream : std::uint64_t {
  base_arc = 1,
  perturb_arc = 2,
  arc_cost = 3,
  degree_repair = 4,
  insertion_order = 5,
  trial = 6,
};

inline std::uint64_t stream_key(std::uint64_t seed, Stream stream,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (static_cast<std::uint64_t>(stream) + kGolden));
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + kGolden));
  return h;
}

// Uniform double in [0, 1) from a 64-bit word (53 mantissa bits).
inline double unit_double(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// EXP(1) draw: inverse CDF of P(X >= x) = e^{-x}.
inline double exp1_double(std::uint64_t h) {
  return -std::log1p(-unit_double(h));
}

// Sequential splitmix64 stream for the few call sites that are inherently
// sequential (degree repair, shuffles). Does not use <random> distributions,
// which are not bit-portable.
class Sequence {
 public:
  explicit Sequence(std::uint64_t key) : state_(key) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  double next_unit() { return unit_double(next()); }

  // Unbiased draw from [0, bound) by masked rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~0ULL >> __builtin_clzll((bound - 1) | 1);
    for (;;) {
      std::uint64_t x = next() & mask;
      if (x < bound) return x;
    }
  }

 private:
  std::uint64_t state_;
};

template <class T>
void shuffle(std::vector<T>& v, Sequence& seq) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(seq.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace patchkit::rng
