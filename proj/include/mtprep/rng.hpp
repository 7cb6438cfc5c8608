#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace mtprep {

// All sampling in the toolkit goes through this wrapper so results are
// bit-identical across platforms. std::mt19937_64 has a fully specified
// sequence; the bounded draw uses unbiased rejection sampling instead of
// std::uniform_int_distribution, whose algorithm is implementation-defined.
inline constexpr const char* kRngAlgorithm = "mt19937_64+rejection";

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). n must be nonzero.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return double(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::uint64_t> shuffled_indices(std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  SeededRng rng(seed);
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = rng.uniform_below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace mtprep
