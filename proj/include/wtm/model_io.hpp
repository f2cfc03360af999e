#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "wtm/machine.hpp"

namespace wtm {

/// WTMM layout (little-endian):
///   "WTMM", u8 version (1),
///   u32 features, u32 classes, u32 positive clauses, u32 negative clauses,
///   i32 states per action, i32 T, f64 p_s, f64 gamma,
///   u64 training seed, i64 timestamp (unix seconds),
///   per class, positive bank then negative bank, per clause:
///     2 * features i32 automaton states, f64 weight,
///   u64 checksum: FNV-1a 64 over every preceding byte except the timestamp.
inline constexpr std::uint8_t kWtmmVersion = 1;

struct ModelFile {
  MulticlassWTM machine;
  std::uint64_t seed = 0;
  std::int64_t timestamp = 0;
  std::uint64_t checksum = 0;
};

/// Writes the model and returns its checksum.
std::uint64_t write_model(const MulticlassWTM& machine, std::uint64_t seed,
                          std::int64_t timestamp, std::ostream& out);
ModelFile read_model(std::istream& in);

/// Checksum the model would be stored with; independent of the timestamp.
std::uint64_t model_checksum(const MulticlassWTM& machine, std::uint64_t seed);

std::uint64_t save_model(const MulticlassWTM& machine, std::uint64_t seed,
                         const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace wtm
