#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gtlab {

// The engine is the standard 64-bit Mersenne Twister, whose output sequence is
// fixed by the C++ standard. The std:: distributions are not, so the helpers
// below turn raw engine words into variates the same way on every platform.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on {0, ..., bound-1}; Lemire's multiply-and-reject, unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

// Number of failures before the first success of a Bernoulli(p) sequence.
// Used to jump between the ones of a sparse random matrix instead of flipping
// a coin per entry. Inversion G = max{m : q^m >= u} with u uniform on (0, 1],
// through a guide table over u when q^m falls off quickly enough; the tail
// beyond the table restarts by memorylessness.
class GeometricSkip {
 public:
  explicit GeometricSkip(double p) : p_(p) {
    if (!(p > 0.0 && p < 1.0)) return;
    inv_log_q_ = 1.0 / std::log1p(-p);
    const double q = 1.0 - p;
    // Table up to the first m with q^m below 1/64, if that is not too far.
    if (std::pow(q, static_cast<double>(kMaxTable)) >= 1.0 / 64) return;
    powers_.push_back(1.0);
    while (powers_.back() >= 1.0 / 64) powers_.push_back(std::pow(q, static_cast<double>(powers_.size())));
    // Bucket j holds u in [j/B, (j+1)/B); G is nonincreasing in u, so its
    // value at the bucket top is a lower bound to walk up from.
    guide_.resize(kBuckets);
    std::size_t m = powers_.size() - 1;
    for (std::size_t j = 0; j < kBuckets; ++j) {
      const double top = static_cast<double>(j + 1) / static_cast<double>(kBuckets);
      while (m > 0 && powers_[m] < top) --m;
      guide_[j] = static_cast<std::uint32_t>(m);
    }
  }

  std::uint64_t operator()(Rng& rng) const {
    if (p_ >= 1.0) return 0;
    if (p_ <= 0.0) return UINT64_MAX;
    if (powers_.empty()) {
      // 1 - u lies in (0, 1], so the logarithm is finite.
      const double u = 1.0 - uniform01(rng);
      const double g = std::floor(std::log(u) * inv_log_q_);
      return g >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(g);
    }
    const std::size_t last = powers_.size() - 1;
    std::uint64_t base = 0;
    while (true) {
      const double u = 1.0 - uniform01(rng);
      if (u < powers_[last]) {
        base += last;
        continue;
      }
      std::size_t j = static_cast<std::size_t>(u * static_cast<double>(kBuckets));
      if (j >= kBuckets) j = kBuckets - 1;
      return base + walk(guide_[j], u);
    }
  }

  // Same law from 32-bit uniforms u = (x + 1) / 2^32, half an engine word
  // per draw; cell probabilities are then exact to about 2^-32.
  template <class Source>
  std::uint64_t draw32(Source& next) const {
    if (powers_.empty()) {
      const double u = (static_cast<double>(next()) + 1.0) * 0x1.0p-32;
      const double g = std::floor(std::log(u) * inv_log_q_);
      return g >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(g);
    }
    const std::size_t last = powers_.size() - 1;
    std::uint64_t base = 0;
    while (true) {
      const std::uint32_t x = next();
      const double u = (static_cast<double>(x) + 1.0) * 0x1.0p-32;
      if (u < powers_[last]) {
        base += last;
        continue;
      }
      return base + walk(guide_[x >> kBucketShift], u);
    }
  }

  bool valid() const { return p_ > 0.0 && p_ < 1.0; }

 private:
  std::size_t walk(std::size_t m, double u) const {
    while (m + 1 < powers_.size() && powers_[m + 1] >= u) ++m;
    return m;
  }

  static constexpr std::size_t kBucketShift = 20;
  static constexpr std::size_t kBuckets = std::size_t{1} << (32 - kBucketShift);
  static constexpr std::size_t kMaxTable = 4096;
  double p_;
  double inv_log_q_ = 0.0;
  std::vector<double> powers_;        // q^m for m = 0..last
  std::vector<std::uint32_t> guide_;  // G at the top of each u bucket
};

}  // namespace gtlab
