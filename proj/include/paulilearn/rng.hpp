#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace paulilearn {

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

/// xoshiro256++ stream seeded from a counter key, so any (seed, depth,
/// circuit, shot) stream is reproducible in isolation and shot generation
/// parallelizes without coordination.
class Rng {
 public:
  Rng() : Rng(0, 0, 0, 0) {}

  Rng(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t sm = seed;
    sm ^= 0x6a09e667f3bcc908ULL + detail::splitmix64(sm);
    sm ^= a * 0xbb67ae8584caa73bULL + detail::splitmix64(sm);
    sm ^= b * 0x3c6ef372fe94f82bULL + detail::splitmix64(sm);
    sm ^= c * 0xa54ff53a5f1d36f1ULL + detail::splitmix64(sm);
    for (auto& w : s_) w = detail::splitmix64(sm);
  }

  using result_type = uint64_t;
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }

  uint64_t operator()() {
    const uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, bound) by rejection; bound >= 1.
  uint64_t bounded(uint64_t bound) {
    const uint64_t threshold = (-bound) % bound;
    for (;;) {
      uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  uint64_t bits(unsigned nbits) {
    return nbits == 0 ? 0 : ((*this)() >> (64 - nbits));
  }

  /// Binomial(trials, p) by direct Bernoulli counting; trials here stay small
  /// (hundreds), so no tail-approximation machinery.
  uint64_t binomial(uint64_t trials, double p) {
    uint64_t k = 0;
    for (uint64_t i = 0; i < trials; ++i) k += bernoulli(p);
    return k;
  }

 private:
  std::array<uint64_t, 4> s_;
};

/// Draws indices from a fixed discrete distribution via inverse CDF.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cdf_.resize(weights.size());
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] > 0 ? weights[i] : 0.0;
      cdf_[i] = acc;
    }
    total_ = acc;
  }

  size_t operator()(Rng& rng) const {
    const double u = rng.uniform() * total_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<size_t>(it - cdf_.begin());
  }

  bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace paulilearn
