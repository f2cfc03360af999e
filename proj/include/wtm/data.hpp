#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wtm/bitvector.hpp"
#include "wtm/sampling.hpp"

namespace wtm {

/// Rows of `features` binary features with labels in [0, classes).
class BinaryDataset {
 public:
  BinaryDataset() = default;
  BinaryDataset(std::size_t features, std::size_t classes);

  std::size_t features() const noexcept { return features_; }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  /// Throws ArgumentError on a width mismatch or label >= classes().
  void add(BitVector features, std::uint32_t label);

  const BitVector& row(std::size_t i) const noexcept { return rows_[i]; }
  std::uint32_t label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

  friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

 private:
  std::size_t features_ = 0;
  std::size_t classes_ = 0;
  std::vector<BitVector> rows_;
  std::vector<std::uint32_t> labels_;
};

inline constexpr int kDefaultGrayThreshold = 77;

/// bit k = pixels[k] >= threshold. Throws ArgumentError for pixels or a
/// threshold outside [0, 255].
BitVector binarize_grayscale(std::span<const int> pixels, int threshold = kDefaultGrayThreshold);
BitVector binarize_grayscale(std::span<const std::uint8_t> pixels,
                             int threshold = kDefaultGrayThreshold);

// Connect-4 --------------------------------------------------------------

enum class Cell : std::uint8_t { Empty, PlayerOne, PlayerTwo };

inline constexpr std::size_t kConnect4Rows = 6;
inline constexpr std::size_t kConnect4Columns = 7;
inline constexpr std::size_t kConnect4Cells = kConnect4Rows * kConnect4Columns;
inline constexpr std::size_t kConnect4Features = 2 * kConnect4Cells;

/// Cells in UCI attribute order a1..a6, b1..b6, ..., g1..g6 (column-major,
/// row 1 at the bottom): index = column * 6 + row.
using Connect4Board = std::array<Cell, kConnect4Cells>;

/// Game outcome labels for the first player: win=0, loss=1, draw=2.
enum class Connect4Outcome : std::uint32_t { Win = 0, Loss = 1, Draw = 2 };

/// 84 bits: [0, 42) player-one occupancy, [42, 84) player-two occupancy, both
/// in the board's cell order.
BitVector encode_connect4(const Connect4Board& board);

struct Connect4Example {
  Connect4Board board{};
  Connect4Outcome outcome = Connect4Outcome::Win;
};

/// Parses one UCI line: 42 comma-separated cells from {x, o, b} then
/// {win, loss, draw}. Throws ParseError(Symbol) naming the bad token.
Connect4Example parse_connect4_line(std::string_view line);

BinaryDataset read_connect4(std::istream& in);
BinaryDataset read_connect4(const std::filesystem::path& path);

// MNIST IDX ----------------------------------------------------------------

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * columns, row-major

  std::span<const std::uint8_t> image(std::size_t i) const noexcept {
    return std::span(pixels).subspan(i * rows * columns, rows * columns);
  }
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

/// 28x28 images become 784 features; labels 0..9 give 10 classes.
BinaryDataset mnist_from_idx(const std::filesystem::path& images,
                             const std::filesystem::path& labels,
                             int threshold = kDefaultGrayThreshold);

// Container formats ---------------------------------------------------------

enum class DatasetFormat { Auto, Wtmd, Text };

/// WTMD layout (little-endian): "WTMD", u8 version (1), u32 features,
/// u32 classes, u64 rows, then per row u32 label and ceil(features/8) bytes
/// of packed features (feature k is bit k%8 of byte k/8).
inline constexpr std::uint8_t kWtmdVersion = 1;

void write_wtmd(const BinaryDataset& data, std::ostream& out);
BinaryDataset read_wtmd(std::istream& in);

/// Text layout: one row per line, "<label> <bits>" with bits as a run of '0'
/// and '1'. Blank lines and lines starting with '#' are skipped. The class
/// count is max(label) + 1 (at least 2) unless `classes` is nonzero.
BinaryDataset read_text(std::istream& in, std::size_t classes = 0);
void write_text(const BinaryDataset& data, std::ostream& out);

BinaryDataset load_dataset(const std::filesystem::path& path,
                           DatasetFormat format = DatasetFormat::Auto);
void save_dataset(const BinaryDataset& data, const std::filesystem::path& path);

/// Random disjoint split; the test part holds round(size * test_fraction)
/// rows. Both parts keep the original row order.
std::pair<BinaryDataset, BinaryDataset> split_dataset(const BinaryDataset& data,
                                                      double test_fraction, Rng& rng);

}  // namespace wtm
