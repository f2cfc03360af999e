#include "wtm/bitvector.hpp"

#include <bit>

#include "wtm/errors.hpp"

namespace wtm {

namespace {

// dest |= src << offset (bit offset), src holding `bits` bits.
void or_shifted(std::span<std::uint64_t> dest, std::span<const std::uint64_t> src,
                std::size_t offset) {
  const std::size_t word = offset >> 6;
  const unsigned shift = offset & 63;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (word + i < dest.size()) dest[word + i] |= src[i] << shift;
    if (shift != 0 && word + i + 1 < dest.size()) dest[word + i + 1] |= src[i] >> (64 - shift);
  }
}

}  // namespace

BitVector::BitVector(std::initializer_list<int> bits) : BitVector(bits.size()) {
  std::size_t i = 0;
  for (const int b : bits) {
    if (b != 0 && b != 1) throw ArgumentError("BitVector: bits must be 0 or 1");
    set(i++, b == 1);
  }
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw ArgumentError("BitVector: bits must be 0 or 1");
    if (bits[i]) v.set(i);
  }
  return v;
}

std::size_t BitVector::count() const noexcept {
  std::size_t n = 0;
  for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

LiteralVector::LiteralVector(const BitVector& features) : bits_(2 * features.size()) {
  const std::size_t o = features.size();
  auto dest = bits_.words();
  const auto src = features.words();
  std::copy(src.begin(), src.end(), dest.begin());

  std::vector<std::uint64_t> negated(src.begin(), src.end());
  for (auto& w : negated) w = ~w;
  if (const std::size_t tail = o & 63; tail != 0 && !negated.empty()) {
    negated.back() &= (std::uint64_t{1} << tail) - 1;
  }
  or_shifted(dest, negated, o);
}

}  // namespace wtm
