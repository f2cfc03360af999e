#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wtm/automaton.hpp"
#include "wtm/bitvector.hpp"
#include "wtm/sampling.hpp"

namespace wtm {

/// Evaluation mode for a clause with no included literals: it outputs 1 while
/// learning (so Type I feedback can grow it) and 0 when classifying.
enum class EvalMode { Learn, Classify };

/// A conjunctive clause over o features: 2o automata (index k < o is literal
/// x_{k+1}, index k >= o is NOT x_{k-o+1}) and a positive vote weight.
///
/// The include decisions are mirrored in a packed bit mask that is kept in
/// sync on every state change, so evaluation is a word-wise and-not test.
class Clause {
 public:
  Clause() = default;

  /// All automata at state N (weakest exclude).
  Clause(std::size_t features, std::int32_t states_per_action);

  /// Explicit states; throws ArgumentError on a wrong length, an out-of-range
  /// state or a non-positive weight.
  Clause(std::size_t features, std::int32_t states_per_action, std::vector<std::int32_t> states,
         double weight = 1.0);

  /// Each automaton starts at N or N+1 with equal probability.
  static Clause random(std::size_t features, std::int32_t states_per_action, Rng& rng);

  std::size_t features() const noexcept { return features_; }
  std::size_t literal_count() const noexcept { return states_.size(); }
  std::int32_t states_per_action() const noexcept { return half_; }

  std::int32_t state(std::size_t k) const noexcept { return states_[k]; }
  std::span<const std::int32_t> states() const noexcept { return states_; }
  void set_state(std::size_t k, std::int32_t state);

  Action action(std::size_t k) const noexcept { return wtm::action(states_[k], half_); }
  bool includes(std::size_t k) const noexcept { return (include_[k >> 6] >> (k & 63)) & 1U; }

  void penalize(std::size_t k) noexcept { update(k, after_penalty(states_[k], half_)); }
  void reward(std::size_t k) noexcept { update(k, after_reward(states_[k], half_)); }

  std::span<const std::uint64_t> include_words() const noexcept { return include_; }
  std::size_t included_count() const noexcept { return included_; }

  double weight() const noexcept { return weight_; }
  void set_weight(double weight);

  /// Output on an already-expanded literal vector. No width check.
  bool fires(const LiteralVector& literals, EvalMode mode) const noexcept;

  /// Sorted indices of the automata currently choosing Include.
  std::vector<std::size_t> included_literals() const;

  friend bool operator==(const Clause& a, const Clause& b) noexcept {
    return a.features_ == b.features_ && a.half_ == b.half_ && a.states_ == b.states_ &&
           a.weight_ == b.weight_;
  }

 private:
  void update(std::size_t k, std::int32_t next) noexcept {
    const bool was = states_[k] > half_;
    const bool now = next > half_;
    states_[k] = next;
    if (was != now) {
      include_[k >> 6] ^= std::uint64_t{1} << (k & 63);
      included_ = now ? included_ + 1 : included_ - 1;
    }
  }
  void rebuild_mask();

  std::size_t features_ = 0;
  std::int32_t half_ = 1;
  std::vector<std::int32_t> states_;
  std::vector<std::uint64_t> include_;
  std::size_t included_ = 0;
  double weight_ = 1.0;
};

/// Clause output on a raw feature vector. Throws ArgumentError when
/// x.size() != c.features().
bool clause_output(const Clause& c, const BitVector& x, EvalMode mode);

}  // namespace wtm
