#include <atomic>
#include <cstdlib>
#include <string_view>

#include "wtm/kernels.hpp"

namespace wtm::kernels {

#if defined(WTM_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table() noexcept;
}
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(WTM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& best_available() noexcept {
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("WTM_KERNELS")) {
    const std::string_view name(env);
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2" && avx2_kernels() != nullptr) return avx2_kernels();
  }
  return &best_available();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(WTM_HAVE_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
  return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) noexcept {
  const KernelTable* table = nullptr;
  if (name == "scalar") {
    table = &scalar_kernels();
  } else if (name == "avx2") {
    table = avx2_kernels();
  } else if (name == "auto") {
    table = &best_available();
  }
  if (table == nullptr) return false;
  current().store(table, std::memory_order_relaxed);
  return true;
}

}  // namespace wtm::kernels
