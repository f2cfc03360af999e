#pragma once

// Direct transcription of the Type I and Type II feedback tables and the
// automaton transition rules, written independently of the library.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wtm/bitvector.hpp"

namespace wtm::testing {

inline std::int32_t ref_penalty(std::int32_t s, std::int32_t n) { return s <= n ? s + 1 : s - 1; }

inline std::int32_t ref_reward(std::int32_t s, std::int32_t n) {
  if (s <= n) return s > 1 ? s - 1 : s;
  return s < 2 * n ? s + 1 : s;
}

enum class Response { None, Reward, Penalty, MaskedReward, MaskedPenalty, NotApplicable };

// Columns: (clause, literal) = 00, 01, 10, 11.
inline Response type_i_cell(bool clause, bool literal, bool included) {
  static constexpr Response include_row[4] = {Response::MaskedPenalty, Response::MaskedPenalty,
                                              Response::NotApplicable, Response::Reward};
  static constexpr Response exclude_row[4] = {Response::MaskedReward, Response::MaskedReward,
                                              Response::MaskedReward, Response::Penalty};
  const int col = (clause ? 2 : 0) + (literal ? 1 : 0);
  return included ? include_row[col] : exclude_row[col];
}

inline Response type_ii_cell(bool clause, bool literal, bool included) {
  static constexpr Response include_row[4] = {Response::None, Response::None,
                                              Response::NotApplicable, Response::None};
  static constexpr Response exclude_row[4] = {Response::None, Response::None, Response::Penalty,
                                              Response::None};
  const int col = (clause ? 2 : 0) + (literal ? 1 : 0);
  return included ? include_row[col] : exclude_row[col];
}

inline std::int32_t apply_cell(Response r, std::int32_t s, std::int32_t n, bool masked) {
  switch (r) {
    case Response::Reward: return ref_reward(s, n);
    case Response::Penalty: return ref_penalty(s, n);
    case Response::MaskedReward: return masked ? ref_reward(s, n) : s;
    case Response::MaskedPenalty: return masked ? ref_penalty(s, n) : s;
    default: return s;
  }
}

inline bool literal_value(const BitVector& x, std::size_t k) {
  const std::size_t o = x.size();
  return k < o ? x.test(k) : !x.test(k - o);
}

inline BitVector bits_of(unsigned v, std::size_t o) {
  BitVector x(o);
  for (std::size_t k = 0; k < o; ++k) x.set(k, (v >> k) & 1U);
  return x;
}

/// Clause output computed from raw states: every included literal is true.
/// An empty clause counts as firing (learning semantics).
inline bool ref_clause_learn(const std::vector<std::int32_t>& states, std::int32_t n,
                             const BitVector& x) {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] > n && !literal_value(x, k)) return false;
  }
  return true;
}

/// Decodes `index` as base-2N digits into a state vector of length u.
inline std::vector<std::int32_t> states_from_index(std::size_t index, std::size_t u,
                                                   std::int32_t n) {
  std::vector<std::int32_t> states(u);
  for (auto& s : states) {
    s = static_cast<std::int32_t>(index % static_cast<std::size_t>(2 * n)) + 1;
    index /= static_cast<std::size_t>(2 * n);
  }
  return states;
}

}  // namespace wtm::testing
