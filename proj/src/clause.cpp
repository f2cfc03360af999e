#include "wtm/clause.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "wtm/errors.hpp"
#include "wtm/kernels.hpp"

namespace wtm {

namespace {

void check_half(std::int32_t half) {
  if (half < 1) throw ArgumentError("states per action must be >= 1");
}

}  // namespace

Clause::Clause(std::size_t features, std::int32_t states_per_action)
    : features_(features),
      half_(states_per_action),
      states_(2 * features, states_per_action),
      include_((2 * features + 63) / 64, 0) {
  check_half(states_per_action);
}

Clause::Clause(std::size_t features, std::int32_t states_per_action,
               std::vector<std::int32_t> states, double weight)
    : features_(features), half_(states_per_action), states_(std::move(states)) {
  check_half(states_per_action);
  if (states_.size() != 2 * features) {
    throw ArgumentError("clause over " + std::to_string(features) + " features needs " +
                        std::to_string(2 * features) + " automata, got " +
                        std::to_string(states_.size()));
  }
  for (const auto s : states_) {
    if (!is_valid_state(s, half_)) {
      throw ArgumentError("automaton state " + std::to_string(s) + " outside [1, " +
                          std::to_string(2 * half_) + "]");
    }
  }
  set_weight(weight);
  rebuild_mask();
}

Clause Clause::random(std::size_t features, std::int32_t states_per_action, Rng& rng) {
  Clause c(features, states_per_action);
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < c.states_.size(); ++k) {
    if ((k & 63) == 0) bits = rng.next_u64();
    c.states_[k] = states_per_action + static_cast<std::int32_t>((bits >> (k & 63)) & 1U);
  }
  c.rebuild_mask();
  return c;
}

void Clause::set_state(std::size_t k, std::int32_t state) {
  if (k >= states_.size()) throw ArgumentError("automaton index out of range");
  if (!is_valid_state(state, half_)) {
    throw ArgumentError("automaton state " + std::to_string(state) + " outside [1, " +
                        std::to_string(2 * half_) + "]");
  }
  update(k, state);
}

void Clause::set_weight(double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw ArgumentError("clause weight must be positive and finite");
  }
  weight_ = weight;
}

void Clause::rebuild_mask() {
  include_.assign((states_.size() + 63) / 64, 0);
  included_ = 0;
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k] > half_) {
      include_[k >> 6] |= std::uint64_t{1} << (k & 63);
      ++included_;
    }
  }
}

bool Clause::fires(const LiteralVector& literals, EvalMode mode) const noexcept {
  if (mode == EvalMode::Classify && included_ == 0) return false;
  return kernels::active().clause_fires(include_.data(), literals.words().data(),
                                        include_.size());
}

std::vector<std::size_t> Clause::included_literals() const {
  std::vector<std::size_t> out;
  out.reserve(included_);
  for (std::size_t w = 0; w < include_.size(); ++w) {
    for (std::uint64_t bits = include_[w]; bits != 0; bits &= bits - 1) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  }
  return out;
}

bool clause_output(const Clause& c, const BitVector& x, EvalMode mode) {
  if (x.size() != c.features()) {
    throw ArgumentError("input has " + std::to_string(x.size()) + " features, clause expects " +
                        std::to_string(c.features()));
  }
  return c.fires(LiteralVector(x), mode);
}

}  // namespace wtm
