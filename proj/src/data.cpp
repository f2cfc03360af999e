#include "wtm/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "byte_io.hpp"
#include "wtm/errors.hpp"

namespace wtm {

namespace {

constexpr char kWtmdMagic[4] = {'W', 'T', 'M', 'D'};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::Io, "cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

}  // namespace

BinaryDataset::BinaryDataset(std::size_t features, std::size_t classes)
    : features_(features), classes_(classes) {
  if (features == 0) throw ArgumentError("dataset needs at least one feature");
  if (classes < 2) throw ArgumentError("dataset needs at least two classes");
}

void BinaryDataset::add(BitVector features, std::uint32_t label) {
  if (features.size() != features_) {
    throw ArgumentError("row has " + std::to_string(features.size()) + " features, dataset has " +
                        std::to_string(features_));
  }
  if (label >= classes_) {
    throw ArgumentError("label " + std::to_string(label) + " >= class count " +
                        std::to_string(classes_));
  }
  rows_.push_back(std::move(features));
  labels_.push_back(label);
}

BitVector binarize_grayscale(std::span<const int> pixels, int threshold) {
  if (threshold < 0 || threshold > 255) throw ArgumentError("threshold must lie in [0, 255]");
  BitVector bits(pixels.size());
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    if (pixels[k] < 0 || pixels[k] > 255) {
      throw ArgumentError("pixel " + std::to_string(k) + " = " + std::to_string(pixels[k]) +
                          " outside [0, 255]");
    }
    if (pixels[k] >= threshold) bits.set(k);
  }
  return bits;
}

BitVector binarize_grayscale(std::span<const std::uint8_t> pixels, int threshold) {
  if (threshold < 0 || threshold > 255) throw ArgumentError("threshold must lie in [0, 255]");
  BitVector bits(pixels.size());
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    if (pixels[k] >= threshold) bits.set(k);
  }
  return bits;
}

BitVector encode_connect4(const Connect4Board& board) {
  BitVector bits(kConnect4Features);
  for (std::size_t i = 0; i < kConnect4Cells; ++i) {
    if (board[i] == Cell::PlayerOne) bits.set(i);
    if (board[i] == Cell::PlayerTwo) bits.set(kConnect4Cells + i);
  }
  return bits;
}

Connect4Example parse_connect4_line(std::string_view line) {
  Connect4Example ex;
  std::size_t field = 0;
  line = trim(line);
  while (true) {
    const std::size_t comma = line.find(',');
    const std::string_view token = trim(line.substr(0, comma));
    if (field < kConnect4Cells) {
      if (token == "x") {
        ex.board[field] = Cell::PlayerOne;
      } else if (token == "o") {
        ex.board[field] = Cell::PlayerTwo;
      } else if (token == "b") {
        ex.board[field] = Cell::Empty;
      } else if (token == "win" || token == "loss" || token == "draw") {
        throw ParseError(ParseError::Kind::Width, "outcome in field " + std::to_string(field + 1) +
                                                      ", expected 42 cells before it");
      } else {
        throw ParseError(ParseError::Kind::Symbol, "unknown cell symbol '" + std::string(token) +
                                                       "' in field " + std::to_string(field + 1));
      }
    } else if (field == kConnect4Cells) {
      if (token == "win") {
        ex.outcome = Connect4Outcome::Win;
      } else if (token == "loss") {
        ex.outcome = Connect4Outcome::Loss;
      } else if (token == "draw") {
        ex.outcome = Connect4Outcome::Draw;
      } else {
        throw ParseError(ParseError::Kind::Label,
                         "unknown outcome '" + std::string(token) + "'");
      }
    } else {
      throw ParseError(ParseError::Kind::Width, "too many fields");
    }
    ++field;
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (field != kConnect4Cells + 1) {
    throw ParseError(ParseError::Kind::Width, "expected 43 fields, got " + std::to_string(field));
  }
  return ex;
}

BinaryDataset read_connect4(std::istream& in) {
  BinaryDataset data(kConnect4Features, 3);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto ex = parse_connect4_line(line);
      data.add(encode_connect4(ex.board), static_cast<std::uint32_t>(ex.outcome));
    } catch (const ParseError& e) {
      throw ParseError(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

BinaryDataset read_connect4(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_connect4(in);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), path.string() + ": " + e.what());
  }
}

IdxImages read_idx_images(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto bytes = detail::read_all(in);
  if (bytes.size() < 16 || read_be32(bytes.data()) != 0x00000803) {
    throw ParseError(ParseError::Kind::Header, path.string() + ": not an IDX image file");
  }
  IdxImages images;
  images.count = read_be32(bytes.data() + 4);
  images.rows = read_be32(bytes.data() + 8);
  images.columns = read_be32(bytes.data() + 12);
  const std::size_t payload = images.count * images.rows * images.columns;
  if (bytes.size() - 16 < payload) {
    throw ParseError(ParseError::Kind::Truncated, path.string() + ": truncated image payload");
  }
  images.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(payload));
  return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto bytes = detail::read_all(in);
  if (bytes.size() < 8 || read_be32(bytes.data()) != 0x00000801) {
    throw ParseError(ParseError::Kind::Header, path.string() + ": not an IDX label file");
  }
  const std::size_t count = read_be32(bytes.data() + 4);
  if (bytes.size() - 8 < count) {
    throw ParseError(ParseError::Kind::Truncated, path.string() + ": truncated label payload");
  }
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<long>(count)};
}

BinaryDataset mnist_from_idx(const std::filesystem::path& images_path,
                             const std::filesystem::path& labels_path, int threshold) {
  const auto images = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (labels.size() != images.count) {
    throw ParseError(ParseError::Kind::Header,
                     "image count " + std::to_string(images.count) + " != label count " +
                         std::to_string(labels.size()));
  }
  BinaryDataset data(images.rows * images.columns, 10);
  for (std::size_t i = 0; i < images.count; ++i) {
    if (labels[i] >= 10) {
      throw ParseError(ParseError::Kind::Label, labels_path.string() + ": label " +
                                                    std::to_string(labels[i]) + " at row " +
                                                    std::to_string(i));
    }
    data.add(binarize_grayscale(images.image(i), threshold), labels[i]);
  }
  return data;
}

void write_wtmd(const BinaryDataset& data, std::ostream& out) {
  detail::ByteWriter w;
  w.raw(kWtmdMagic, 4);
  w.u8(kWtmdVersion);
  w.u32(static_cast<std::uint32_t>(data.features()));
  w.u32(static_cast<std::uint32_t>(data.classes()));
  w.u64(data.size());
  const std::size_t row_bytes = (data.features() + 7) / 8;
  for (std::size_t i = 0; i < data.size(); ++i) {
    w.u32(data.label(i));
    const auto words = data.row(i).words();
    for (std::size_t b = 0; b < row_bytes; ++b) {
      w.u8(static_cast<std::uint8_t>(words[b / 8] >> (8 * (b % 8))));
    }
  }
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) throw ParseError(ParseError::Kind::Io, "write failed");
}

BinaryDataset read_wtmd(std::istream& in) {
  const auto bytes = detail::read_all(in);
  if (bytes.size() < 4 || !std::equal(kWtmdMagic, kWtmdMagic + 4, bytes.begin())) {
    throw ParseError(ParseError::Kind::Header, "missing WTMD header");
  }
  detail::ByteReader r(bytes.data(), bytes.size(), "WTMD");
  r.take(4);
  try {
    const std::uint8_t version = r.u8();
    if (version != kWtmdVersion) {
      throw ParseError(ParseError::Kind::Header,
                       "unsupported WTMD version " + std::to_string(version));
    }
    const std::uint32_t features = r.u32();
    const std::uint32_t classes = r.u32();
    const std::uint64_t rows = r.u64();
    if (features == 0 || classes < 2) {
      throw ParseError(ParseError::Kind::Header, "WTMD header: features=" +
                                                     std::to_string(features) +
                                                     " classes=" + std::to_string(classes));
    }
    const std::size_t row_bytes = (features + 7) / 8;
    if (r.remaining() / (4 + row_bytes) < rows) {
      throw ParseError(ParseError::Kind::Truncated,
                       "WTMD payload holds fewer than the declared " + std::to_string(rows) +
                           " rows");
    }
    BinaryDataset data(features, classes);
    for (std::uint64_t i = 0; i < rows; ++i) {
      const std::uint32_t label = r.u32();
      if (label >= classes) {
        throw ParseError(ParseError::Kind::Label, "row " + std::to_string(i + 1) + ": label " +
                                                      std::to_string(label) + " >= " +
                                                      std::to_string(classes));
      }
      const std::uint8_t* p = r.take(row_bytes);
      BitVector x(features);
      auto words = x.words();
      for (std::size_t b = 0; b < row_bytes; ++b) {
        words[b / 8] |= std::uint64_t{p[b]} << (8 * (b % 8));
      }
      if (const std::size_t tail = features & 7; tail != 0 && (p[row_bytes - 1] >> tail) != 0) {
        throw ParseError(ParseError::Kind::Width,
                         "row " + std::to_string(i + 1) + ": bits set beyond feature width");
      }
      data.add(std::move(x), label);
    }
    if (r.remaining() != 0) {
      throw ParseError(ParseError::Kind::Width, "WTMD: trailing bytes after last row");
    }
    return data;
  } catch (const ArgumentError& e) {
    throw ParseError(ParseError::Kind::Header, e.what());
  }
}

BinaryDataset read_text(std::istream& in, std::size_t classes) {
  std::vector<std::pair<std::uint32_t, BitVector>> rows;
  std::size_t width = 0;
  std::uint32_t max_label = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t space = s.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw ParseError(ParseError::Kind::Width,
                       "line " + std::to_string(line_no) + ": expected '<label> <bits>'");
    }
    const auto label_text = s.substr(0, space);
    const auto bits = trim(s.substr(space));
    std::uint32_t label = 0;
    for (const char ch : label_text) {
      if (ch < '0' || ch > '9') {
        throw ParseError(ParseError::Kind::Label, "line " + std::to_string(line_no) +
                                                      ": bad label '" + std::string(label_text) +
                                                      "'");
      }
      label = label * 10 + static_cast<std::uint32_t>(ch - '0');
    }
    if (rows.empty()) {
      width = bits.size();
      if (width == 0) {
        throw ParseError(ParseError::Kind::Width, "line " + std::to_string(line_no) + ": no bits");
      }
    } else if (bits.size() != width) {
      throw ParseError(ParseError::Kind::Width, "row " + std::to_string(rows.size() + 1) + " (line " +
                                                    std::to_string(line_no) + ") has " +
                                                    std::to_string(bits.size()) +
                                                    " features, expected " +
                                                    std::to_string(width));
    }
    BitVector x(width);
    for (std::size_t k = 0; k < width; ++k) {
      if (bits[k] == '1') {
        x.set(k);
      } else if (bits[k] != '0') {
        throw ParseError(ParseError::Kind::Symbol, "line " + std::to_string(line_no) +
                                                       ": unexpected character '" +
                                                       std::string(1, bits[k]) + "'");
      }
    }
    max_label = std::max(max_label, label);
    rows.emplace_back(label, std::move(x));
  }
  if (rows.empty()) throw ParseError(ParseError::Kind::Header, "text dataset has no rows");
  const std::size_t n_classes =
      classes != 0 ? classes : std::max<std::size_t>(2, std::size_t{max_label} + 1);
  if (max_label >= n_classes) {
    throw ParseError(ParseError::Kind::Label, "label " + std::to_string(max_label) +
                                                  " >= class count " + std::to_string(n_classes));
  }
  BinaryDataset data(width, n_classes);
  for (auto& [label, x] : rows) data.add(std::move(x), label);
  return data;
}

void write_text(const BinaryDataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i) << ' ';
    for (std::size_t k = 0; k < data.features(); ++k) out << (data.row(i).test(k) ? '1' : '0');
    out << '\n';
  }
}

BinaryDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  auto in = open_input(path);
  if (format == DatasetFormat::Auto) {
    char head[4] = {};
    in.read(head, 4);
    const bool is_wtmd = in.gcount() == 4 && std::equal(head, head + 4, kWtmdMagic);
    in.clear();
    in.seekg(0);
    format = is_wtmd ? DatasetFormat::Wtmd : DatasetFormat::Text;
    if (!is_wtmd && in.peek() == std::char_traits<char>::eof()) format = DatasetFormat::Wtmd;
  }
  try {
    return format == DatasetFormat::Wtmd ? read_wtmd(in) : read_text(in);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), path.string() + ": " + e.what());
  }
}

void save_dataset(const BinaryDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(ParseError::Kind::Io, "cannot write " + path.string());
  write_wtmd(data, out);
}

std::pair<BinaryDataset, BinaryDataset> split_dataset(const BinaryDataset& data,
                                                      double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ArgumentError("test fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto test_count = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_indices(rng, order);
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < test_count; ++i) in_test[order[i]] = true;

  BinaryDataset train(data.features(), data.classes());
  BinaryDataset test(data.features(), data.classes());
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? test : train).add(data.row(i), data.label(i));
  }
  return {std::move(train), std::move(test)};
}

}  // namespace wtm
