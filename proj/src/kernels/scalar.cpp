#include <bit>

#include "wtm/kernels.hpp"

namespace wtm::kernels {

namespace {

bool clause_fires_scalar(const std::uint64_t* include, const std::uint64_t* literals,
                         std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) {
    if ((include[i] & ~literals[i]) != 0) return false;
  }
  return true;
}

std::size_t popcount_scalar(const std::uint64_t* words, std::size_t count) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < count; ++i) n += static_cast<std::size_t>(std::popcount(words[i]));
  return n;
}

void and_not_scalar(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
                    std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) out[i] = a[i] & ~b[i];
}

constexpr KernelTable kScalar{"scalar", clause_fires_scalar, popcount_scalar, and_not_scalar};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace wtm::kernels
