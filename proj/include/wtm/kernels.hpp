#pragma once

// Bit-parallel inner loops over packed 64-bit words. Every kernel has a
// portable scalar reference; vector variants are picked once at runtime from
// what the CPU reports and must produce identical results.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace wtm::kernels {

struct KernelTable {
  const char* name;
  /// True iff (include[i] & ~literals[i]) == 0 for every word, i.e. no
  /// included literal is false.
  bool (*clause_fires)(const std::uint64_t* include, const std::uint64_t* literals,
                       std::size_t words);
  std::size_t (*popcount)(const std::uint64_t* words, std::size_t count);
  /// out[i] = a[i] & ~b[i]
  void (*and_not)(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
                  std::size_t words);
};

const KernelTable& scalar_kernels() noexcept;

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels() noexcept;

/// Table used by the library. Defaults to the widest supported variant; the
/// WTM_KERNELS environment variable ("scalar" / "avx2") overrides at startup.
const KernelTable& active() noexcept;

/// Switch the active table by name ("scalar", "avx2", "auto"). Returns false
/// if the requested variant is unavailable; the active table is then unchanged.
bool select(std::string_view name) noexcept;

}  // namespace wtm::kernels
