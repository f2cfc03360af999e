#pragma once

#include <algorithm>
#include <cstdint>

namespace wtm {

// Two-action Tsetlin automaton with states 1..2N. States 1..N select
// Exclude, N+1..2N select Include.

enum class Action : std::uint8_t { Exclude, Include };

constexpr bool is_valid_state(std::int32_t state, std::int32_t half) noexcept {
  return half >= 1 && state >= 1 && state <= 2 * half;
}

constexpr Action action(std::int32_t state, std::int32_t half) noexcept {
  return state <= half ? Action::Exclude : Action::Include;
}

/// One step toward the centre; crosses the action boundary from N or N+1.
constexpr std::int32_t after_penalty(std::int32_t state, std::int32_t half) noexcept {
  return state <= half ? state + 1 : state - 1;
}

/// One step toward the nearer extreme; saturates at 1 and 2N.
constexpr std::int32_t after_reward(std::int32_t state, std::int32_t half) noexcept {
  return state <= half ? std::max(state - 1, 1) : std::min(state + 1, 2 * half);
}

}  // namespace wtm
