#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace wtm {

/// Fixed-size packed bit vector, little-endian within 64-bit words. Bits past
/// size() in the last word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  BitVector(std::initializer_list<int> bits);

  static BitVector from_bytes(std::span<const std::uint8_t> bits);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }
  std::size_t count() const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The 2o literals of a feature vector x: positions [0, o) hold x, positions
/// [o, 2o) hold the negations.
class LiteralVector {
 public:
  LiteralVector() = default;
  explicit LiteralVector(const BitVector& features);

  std::size_t features() const noexcept { return bits_.size() / 2; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool test(std::size_t k) const noexcept { return bits_.test(k); }
  std::span<const std::uint64_t> words() const noexcept { return bits_.words(); }

 private:
  BitVector bits_;
};

}  // namespace wtm
