#include "wtm/model_io.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <string>

#include "byte_io.hpp"
#include "wtm/errors.hpp"

namespace wtm {

namespace {

constexpr char kMagic[4] = {'W', 'T', 'M', 'M'};
// Offset of the timestamp field: magic, version, 4 x u32, 2 x i32, 2 x f64, seed.
constexpr std::size_t kTimestampOffset = 4 + 1 + 16 + 8 + 16 + 8;

std::uint64_t checksum_of(const std::vector<std::uint8_t>& bytes, std::size_t end) {
  std::uint64_t h = detail::fnv1a(bytes.data(), kTimestampOffset);
  return detail::fnv1a(bytes.data() + kTimestampOffset + 8, end - kTimestampOffset - 8, h);
}

std::vector<std::uint8_t> encode(const MulticlassWTM& machine, std::uint64_t seed,
                                 std::int64_t timestamp) {
  const WTMParams& p = machine.params();
  detail::ByteWriter w;
  w.raw(kMagic, 4);
  w.u8(kWtmmVersion);
  w.u32(static_cast<std::uint32_t>(p.features));
  w.u32(static_cast<std::uint32_t>(machine.classes()));
  w.u32(static_cast<std::uint32_t>(p.positive_clauses));
  w.u32(static_cast<std::uint32_t>(p.negative_clauses));
  w.i32(p.states_per_action);
  w.i32(p.threshold);
  w.f64(p.p_s);
  w.f64(p.gamma);
  w.u64(seed);
  w.i64(timestamp);
  for (std::size_t i = 0; i < machine.classes(); ++i) {
    const BinaryWTM& m = machine.machine(i);
    for (const auto bank : {m.positive(), m.negative()}) {
      for (const Clause& c : bank) {
        for (const std::int32_t s : c.states()) w.i32(s);
        w.f64(c.weight());
      }
    }
  }
  w.u64(checksum_of(w.bytes(), w.size()));
  return std::move(w.bytes());
}

}  // namespace

std::uint64_t model_checksum(const MulticlassWTM& machine, std::uint64_t seed) {
  const auto bytes = encode(machine, seed, 0);
  return checksum_of(bytes, bytes.size() - 8);
}

std::uint64_t write_model(const MulticlassWTM& machine, std::uint64_t seed,
                          std::int64_t timestamp, std::ostream& out) {
  const auto bytes = encode(machine, seed, timestamp);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError(ParseError::Kind::Io, "model write failed");
  return checksum_of(bytes, bytes.size() - 8);
}

ModelFile read_model(std::istream& in) {
  const auto bytes = detail::read_all(in);
  if (bytes.size() < 5 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw ParseError(ParseError::Kind::Header, "missing WTMM header");
  }
  detail::ByteReader r(bytes.data(), bytes.size(), "WTMM");
  r.take(4);
  const std::uint8_t version = r.u8();
  if (version != kWtmmVersion) {
    throw ParseError(ParseError::Kind::Header, "unsupported WTMM version " + std::to_string(version));
  }
  WTMParams p;
  p.features = r.u32();
  const std::uint32_t classes = r.u32();
  p.positive_clauses = r.u32();
  p.negative_clauses = r.u32();
  p.states_per_action = r.i32();
  p.threshold = r.i32();
  p.p_s = r.f64();
  p.gamma = r.f64();
  ModelFile file;
  file.seed = r.u64();
  file.timestamp = r.i64();

  const std::size_t clause_bytes = 2 * p.features * 4 + 8;
  const std::size_t clauses = p.positive_clauses + p.negative_clauses;
  if (p.features == 0 || classes < 2 || clauses == 0) {
    throw ParseError(ParseError::Kind::Header, "WTMM header: empty model shape");
  }
  if (r.remaining() < 8 || (r.remaining() - 8) / clause_bytes / clauses < classes) {
    throw ParseError(ParseError::Kind::Truncated, "WTMM: truncated clause banks");
  }
  const std::size_t body_bytes = classes * clauses * clause_bytes;
  if (r.remaining() != body_bytes + 8) {
    throw ParseError(ParseError::Kind::Truncated, "WTMM: unexpected trailing bytes");
  }
  const std::size_t body_end = r.position() + body_bytes;
  const std::uint64_t expected = checksum_of(bytes, body_end);
  const std::uint64_t stored = [&] {
    detail::ByteReader tail(bytes.data() + body_end, 8, "WTMM");
    return tail.u64();
  }();
  if (stored != expected) throw ParseError(ParseError::Kind::Checksum, "WTMM checksum mismatch");

  try {
    std::vector<BinaryWTM> machines;
    machines.reserve(classes);
    for (std::uint32_t i = 0; i < classes; ++i) {
      auto read_bank = [&](std::size_t count) {
        std::vector<Clause> bank;
        bank.reserve(count);
        for (std::size_t j = 0; j < count; ++j) {
          std::vector<std::int32_t> states(2 * p.features);
          for (auto& s : states) s = r.i32();
          const double weight = r.f64();
          bank.emplace_back(p.features, p.states_per_action, std::move(states), weight);
        }
        return bank;
      };
      auto positive = read_bank(p.positive_clauses);
      auto negative = read_bank(p.negative_clauses);
      machines.emplace_back(p, std::move(positive), std::move(negative));
    }
    file.machine = MulticlassWTM(std::move(machines));
  } catch (const ArgumentError& e) {
    throw ParseError(ParseError::Kind::Header, std::string("WTMM: invalid model: ") + e.what());
  }
  file.checksum = stored;
  return file;
}

std::uint64_t save_model(const MulticlassWTM& machine, std::uint64_t seed,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(ParseError::Kind::Io, "cannot write " + path.string());
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  return write_model(machine, seed, static_cast<std::int64_t>(now), out);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::Io, "cannot open " + path.string());
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace wtm
