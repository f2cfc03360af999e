#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wtm {

/// SplitMix64 step. Used to expand a 64-bit seed into generator state and to
/// derive per-worker seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for worker `index` derived from a master seed. Pure function of its
/// arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seedable xoshiro256** generator (period 2^256 - 1) with a running count of
/// the 64-bit words it has produced.
///
/// The output sequence for a given seed is fixed by this implementation and
/// does not depend on the platform or standard library. Every primitive draw
/// (`next_u64`, and therefore `uniform01`, `uniform_int`, `binomial_draw`)
/// goes through `next_u64`, so `draw_count()` measures total generator work.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    ++draws_;
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Cumulative number of 64-bit draws consumed since construction.
  std::uint64_t draw_count() const noexcept { return draws_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
};

inline std::uint64_t draw_count(const Rng& rng) noexcept { return rng.draw_count(); }

/// Uniform integer in the inclusive range [lo, hi]. Throws ArgumentError if
/// lo > hi. Unbiased (Lemire's multiply-and-reject).
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// Unbiased uniform index in [0, bound). `bound` must be nonzero.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept;

/// Exact Binomial(trials, p) variate.
///
/// Uses inversion (a single uniform draw, CDF walk) when
/// trials * min(p, 1 - p) <= 30 and BTPE rejection otherwise. Throws
/// ArgumentError if p is not in [0, 1].
std::uint64_t binomial_draw(Rng& rng, std::uint64_t trials, double p);

/// Fixed-length bit vector marking the automata selected for a stochastic
/// feedback event.
class FeedbackMask {
 public:
  FeedbackMask() = default;
  explicit FeedbackMask(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }
  void fill() noexcept;
  std::size_t count() const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  friend bool operator==(const FeedbackMask&, const FeedbackMask&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Binomial-uniform sampling: draw the number of set bits from
/// Binomial(size, p), then place them by drawing uniform positions and
/// redrawing on collision. Reuses `mask` storage; its size is unchanged.
void binomial_uniform_fill(Rng& rng, double p, FeedbackMask& mask);

/// Reference Bernoulli process: one uniform draw per position.
void bernoulli_fill(Rng& rng, double p, FeedbackMask& mask);

FeedbackMask binomial_uniform_mask(Rng& rng, std::size_t u, double p);
FeedbackMask bernoulli_mask(Rng& rng, std::size_t u, double p);

/// Which mask generator a Type I feedback event uses.
enum class MaskSampler { BinomialUniform, Bernoulli };

inline void fill_mask(MaskSampler sampler, Rng& rng, double p, FeedbackMask& mask) {
  if (sampler == MaskSampler::BinomialUniform) {
    binomial_uniform_fill(rng, p, mask);
  } else {
    bernoulli_fill(rng, p, mask);
  }
}

/// Fisher-Yates shuffle of an index permutation driven by `rng`.
void shuffle_indices(Rng& rng, std::span<std::size_t> indices) noexcept;

}  // namespace wtm
