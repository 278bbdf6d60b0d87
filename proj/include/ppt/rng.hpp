// Deterministic RNG helpers. mt19937_64 is fully specified by the standard;
// the index/real draws below avoid the implementation-defined std distributions
// so that sampler output is reproducible bit-for-bit from the seed.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ppt {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Per-stream seed derived from a master seed; streams are independent chains.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  (void)splitmix64(s);
  s ^= 0x632be59bd9b4e019ull * (stream + 1);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1) with 53 bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform index in [0,n) (Lemire with rejection).
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_index: n == 0");
    std::uint64_t x = gen_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (-n) % n;
      while (lo < t) {
        x = gen_();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

// Samples an index with probability proportional to the given weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cum_.reserve(weights.size());
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("DiscreteSampler: negative weight");
      s += w;
      cum_.push_back(s);
    }
    if (cum_.empty() || s <= 0.0)
      throw std::invalid_argument("DiscreteSampler: total weight must be positive");
  }

  std::size_t sample(Rng& rng) const {
    double u = rng.next_unit() * cum_.back();
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (u < cum_[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  std::vector<double> cum_;
};

}  // namespace ppt
