#include "wtm/feedback.hpp"

#include <bit>
#include <cassert>
#include <string>

#include "wtm/errors.hpp"

namespace wtm {

namespace {

std::uint64_t valid_bits(std::size_t word, std::size_t size) noexcept {
  const std::size_t end = (word + 1) * 64;
  if (end <= size) return ~std::uint64_t{0};
  return (std::uint64_t{1} << (size & 63)) - 1;
}

void check_width(const Clause& c, const BitVector& x) {
  if (x.size() != c.features()) {
    throw ArgumentError("input has " + std::to_string(x.size()) + " features, clause expects " +
                        std::to_string(c.features()));
  }
}

}  // namespace

void apply_type_i(Clause& c, const LiteralVector& literals, bool output,
                  const FeedbackMask& mask) {
  const auto lit_words = literals.words();
  const auto mask_words = mask.words();
  for (std::size_t w = 0; w < lit_words.size(); ++w) {
    const std::uint64_t lit = lit_words[w];
    const std::uint64_t inc = c.include_words()[w];
    const std::uint64_t certain = output ? lit : 0;
    for (std::uint64_t bits = certain; bits != 0; bits &= bits - 1) {
      const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      if ((inc >> (k & 63)) & 1U) {
        c.reward(k);
      } else {
        c.penalize(k);
      }
    }
    for (std::uint64_t bits = mask_words[w] & ~certain; bits != 0; bits &= bits - 1) {
      const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      if ((inc >> (k & 63)) & 1U) {
        // Clause 1 with an included false literal cannot happen.
        assert(!output);
        c.penalize(k);
      } else {
        c.reward(k);
      }
    }
  }
}

void apply_type_i(Clause& c, const BitVector& x, double p_s, Rng& rng, MaskSampler sampler) {
  check_width(c, x);
  if (!(p_s > 0.0 && p_s < 1.0)) throw ArgumentError("p_s must lie in (0, 1)");
  const LiteralVector literals(x);
  const bool output = c.fires(literals, EvalMode::Learn);
  FeedbackMask mask(c.literal_count());
  fill_mask(sampler, rng, p_s, mask);
  apply_type_i(c, literals, output, mask);
}

void apply_type_ii(Clause& c, const LiteralVector& literals, bool output) {
  if (!output) return;
  const auto lit_words = literals.words();
  for (std::size_t w = 0; w < lit_words.size(); ++w) {
    const std::uint64_t candidates =
        ~lit_words[w] & ~c.include_words()[w] & valid_bits(w, c.literal_count());
    for (std::uint64_t bits = candidates; bits != 0; bits &= bits - 1) {
      c.penalize(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  }
}

void apply_type_ii(Clause& c, const BitVector& x) {
  check_width(c, x);
  const LiteralVector literals(x);
  apply_type_ii(c, literals, c.fires(literals, EvalMode::Learn));
}

}  // namespace wtm
