#pragma once

#include "wtm/bitvector.hpp"
#include "wtm/clause.hpp"
#include "wtm/sampling.hpp"

namespace wtm {

enum class FeedbackKind { TypeI, TypeII };

/// Type I feedback with an explicit stochastic mask. `output` must be the
/// clause's Learn-mode output on `literals` before this call.
///
/// Clause 1 / literal 1: Include is rewarded, Exclude is penalized.
/// Every other cell fires only where `mask` is set: Include is penalized,
/// Exclude is rewarded.
void apply_type_i(Clause& c, const LiteralVector& literals, bool output,
                  const FeedbackMask& mask);

/// Type I feedback drawing one mask of length 2o with rate p_s, p_s in (0, 1).
void apply_type_i(Clause& c, const BitVector& x, double p_s, Rng& rng,
                  MaskSampler sampler = MaskSampler::BinomialUniform);

/// Type II feedback: when the clause fires, penalize every excluded automaton
/// whose literal is 0. Deterministic; draws nothing.
void apply_type_ii(Clause& c, const LiteralVector& literals, bool output);
void apply_type_ii(Clause& c, const BitVector& x);

}  // namespace wtm
