// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "wtm/kernels.hpp"

namespace wtm::kernels::detail {

namespace {

bool clause_fires_avx2(const std::uint64_t* include, const std::uint64_t* literals,
                       std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i inc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(include + i));
    const __m256i lit = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(literals + i));
    // testc(lit, inc) == 1 iff (~lit & inc) == 0
    if (!_mm256_testc_si256(lit, inc)) return false;
  }
  for (; i < words; ++i) {
    if ((include[i] & ~literals[i]) != 0) return false;
  }
  return true;
}

// Nibble-lookup popcount (Mula).
std::size_t popcount_avx2(const std::uint64_t* words, std::size_t count) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + i));
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i bytes =
        _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(bytes, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::size_t n = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < count; ++i) n += static_cast<std::size_t>(std::popcount(words[i]));
  return n;
}

void and_not_avx2(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
                  std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_andnot_si256(vb, va));
  }
  for (; i < words; ++i) out[i] = a[i] & ~b[i];
}

constexpr KernelTable kAvx2{"avx2", clause_fires_avx2, popcount_avx2, and_not_avx2};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace wtm::kernels::detail
