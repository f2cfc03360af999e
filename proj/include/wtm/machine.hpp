#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wtm/bitvector.hpp"
#include "wtm/clause.hpp"
#include "wtm/data.hpp"
#include "wtm/feedback.hpp"
#include "wtm/sampling.hpp"

namespace wtm {

struct WTMParams {
  std::size_t features = 0;
  std::size_t positive_clauses = 50;
  std::size_t negative_clauses = 50;
  std::int32_t states_per_action = 100;
  /// Summation target T.
  std::int32_t threshold = 15;
  /// Per-automaton probability of the stochastic Type I events.
  double p_s = 0.1;
  /// Weight learning rate; 0 keeps every weight at 1 (plain TM).
  double gamma = 0.002;
  MaskSampler sampler = MaskSampler::BinomialUniform;

  /// Even split of `clauses` between the two polarities (the odd one goes
  /// to the positive bank).
  static WTMParams for_clauses(std::size_t features, std::size_t clauses);

  /// Throws ArgumentError when any invariant is violated.
  void validate() const;

  friend bool operator==(const WTMParams&, const WTMParams&) = default;
};

double clamp_sum(double sum, std::int32_t threshold) noexcept;

/// Probability that a clause receives feedback: (T + c) / 2T for y = 0,
/// (T - c) / 2T for y = 1, with c the clamped sum.
double feedback_probability(int y, double clamped, std::int32_t threshold) noexcept;

/// w * (1 + gamma) for Type I, w / (1 + gamma) for Type II.
double update_weight(double weight, FeedbackKind kind, double gamma) noexcept;

/// Two-class weighted Tsetlin machine: a positive and a negative clause bank,
/// stored contiguously in that order.
class BinaryWTM {
 public:
  BinaryWTM() = default;
  BinaryWTM(const WTMParams& params, Rng& rng);
  BinaryWTM(const WTMParams& params, std::vector<Clause> positive, std::vector<Clause> negative);

  const WTMParams& params() const noexcept { return params_; }
  std::span<const Clause> positive() const noexcept { return positive_; }
  std::span<const Clause> negative() const noexcept { return negative_; }
  Clause& positive_clause(std::size_t j) { return positive_.at(j); }
  Clause& negative_clause(std::size_t j) { return negative_.at(j); }

  /// sum_j w+_j C+_j(x) - sum_j w-_j C-_j(x).
  double weighted_sum(const BitVector& x, EvalMode mode = EvalMode::Classify) const;
  double weighted_sum(const LiteralVector& literals, EvalMode mode) const noexcept;

  /// Step function of the Classify-mode sum, with u(0) = 1.
  int predict(const BitVector& x) const;
  int predict(const LiteralVector& literals) const noexcept;

  /// One on-line learning event for example (x, y).
  void fit_example(const BitVector& x, int y, Rng& rng);
  void fit_example(const LiteralVector& literals, int y, Rng& rng);

  friend bool operator==(const BinaryWTM& a, const BinaryWTM& b) noexcept {
    return a.params_ == b.params_ && a.positive_ == b.positive_ && a.negative_ == b.negative_;
  }

 private:
  void check_width(std::size_t features) const;

  WTMParams params_;
  std::vector<Clause> positive_;
  std::vector<Clause> negative_;
  // Scratch for fit_example; not part of the model state.
  std::vector<std::uint8_t> outputs_;
  FeedbackMask mask_;
};

/// How the non-target classes are trained for each example.
enum class NegativeSampling {
  /// One other class, uniformly at random, with target 0.
  RandomOther,
  /// Every other class with target 0.
  AllOthers,
};

/// One BinaryWTM per class; the prediction is the class with the largest
/// weighted sum, ties going to the lowest index.
class MulticlassWTM {
 public:
  MulticlassWTM() = default;
  MulticlassWTM(std::size_t classes, const WTMParams& params, Rng& rng);
  explicit MulticlassWTM(std::vector<BinaryWTM> machines);

  std::size_t classes() const noexcept { return machines_.size(); }
  const WTMParams& params() const noexcept { return machines_.front().params(); }
  const BinaryWTM& machine(std::size_t i) const { return machines_.at(i); }
  BinaryWTM& machine(std::size_t i) { return machines_.at(i); }

  std::vector<double> class_sums(const BitVector& x) const;
  std::vector<double> class_sums(const LiteralVector& literals) const;

  std::size_t predict(const BitVector& x) const;
  std::size_t predict(const LiteralVector& literals) const;

  void fit_example(const BitVector& x, std::size_t y, Rng& rng,
                   NegativeSampling negatives = NegativeSampling::RandomOther);
  void fit_example(const LiteralVector& literals, std::size_t y, Rng& rng,
                   NegativeSampling negatives = NegativeSampling::RandomOther);

  friend bool operator==(const MulticlassWTM&, const MulticlassWTM&) = default;

 private:
  std::vector<BinaryWTM> machines_;
};

/// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

struct TrainOptions {
  std::size_t epochs = 100;
  bool shuffle = true;
  /// 1 runs the sequential trainer. Larger values train classes in parallel
  /// with per-class generators; results then depend on the seed but not on
  /// the worker count, and differ from the sequential stream.
  std::size_t workers = 1;
  NegativeSampling negatives = NegativeSampling::RandomOther;
  /// Report training-set accuracy after each epoch.
  bool evaluate_train = true;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::optional<double> train_accuracy;
  std::optional<double> eval_accuracy;
  /// Wall-clock seconds spent on the training pass (evaluation excluded).
  double seconds = 0.0;
};

std::vector<EpochMetrics> train_epochs(
    MulticlassWTM& machine, const BinaryDataset& train, const BinaryDataset* eval,
    const TrainOptions& options, Rng& rng,
    const std::function<void(const EpochMetrics&)>& on_epoch = {});

double accuracy(const MulticlassWTM& machine, const BinaryDataset& data);

struct WeightStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// max / min
  double ratio = 0.0;
  std::size_t count = 0;
};

/// Statistics over all positive and negative clause weights.
WeightStats weight_statistics(const BinaryWTM& machine);
std::vector<WeightStats> weight_statistics(const MulticlassWTM& machine);

}  // namespace wtm
