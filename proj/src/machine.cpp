#include "wtm/machine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "wtm/errors.hpp"

namespace wtm {

WTMParams WTMParams::for_clauses(std::size_t features, std::size_t clauses) {
  WTMParams p;
  p.features = features;
  p.negative_clauses = clauses / 2;
  p.positive_clauses = clauses - p.negative_clauses;
  return p;
}

void WTMParams::validate() const {
  if (features == 0) throw ArgumentError("feature count must be >= 1");
  if (positive_clauses == 0 || negative_clauses == 0) {
    throw ArgumentError("each polarity needs at least one clause");
  }
  if (states_per_action < 1) throw ArgumentError("states per action must be >= 1");
  if (threshold < 1) throw ArgumentError("summation target T must be >= 1");
  if (!(p_s > 0.0 && p_s < 1.0)) throw ArgumentError("p_s must lie in (0, 1)");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be >= 0");
}

double clamp_sum(double sum, std::int32_t threshold) noexcept {
  const auto t = static_cast<double>(threshold);
  return std::clamp(sum, -t, t);
}

double feedback_probability(int y, double clamped, std::int32_t threshold) noexcept {
  const auto t = static_cast<double>(threshold);
  return y == 0 ? (t + clamped) / (2.0 * t) : (t - clamped) / (2.0 * t);
}

double update_weight(double weight, FeedbackKind kind, double gamma) noexcept {
  return kind == FeedbackKind::TypeI ? weight * (1.0 + gamma) : weight / (1.0 + gamma);
}

// BinaryWTM -------------------------------------------------------------------

BinaryWTM::BinaryWTM(const WTMParams& params, Rng& rng) : params_(params) {
  params_.validate();
  positive_.reserve(params_.positive_clauses);
  negative_.reserve(params_.negative_clauses);
  for (std::size_t j = 0; j < params_.positive_clauses; ++j) {
    positive_.push_back(Clause::random(params_.features, params_.states_per_action, rng));
  }
  for (std::size_t j = 0; j < params_.negative_clauses; ++j) {
    negative_.push_back(Clause::random(params_.features, params_.states_per_action, rng));
  }
}

BinaryWTM::BinaryWTM(const WTMParams& params, std::vector<Clause> positive,
                     std::vector<Clause> negative)
    : params_(params), positive_(std::move(positive)), negative_(std::move(negative)) {
  params_.validate();
  if (positive_.size() != params_.positive_clauses ||
      negative_.size() != params_.negative_clauses) {
    throw ArgumentError("clause bank sizes do not match parameters");
  }
  for (const auto* bank : {&positive_, &negative_}) {
    for (const auto& c : *bank) {
      if (c.features() != params_.features || c.states_per_action() != params_.states_per_action) {
        throw ArgumentError("clause shape does not match parameters");
      }
    }
  }
}

void BinaryWTM::check_width(std::size_t features) const {
  if (features != params_.features) {
    throw ArgumentError("input has " + std::to_string(features) + " features, machine expects " +
                        std::to_string(params_.features));
  }
}

double BinaryWTM::weighted_sum(const BitVector& x, EvalMode mode) const {
  check_width(x.size());
  return weighted_sum(LiteralVector(x), mode);
}

double BinaryWTM::weighted_sum(const LiteralVector& literals, EvalMode mode) const noexcept {
  double pos = 0.0;
  for (const auto& c : positive_) {
    if (c.fires(literals, mode)) pos += c.weight();
  }
  double neg = 0.0;
  for (const auto& c : negative_) {
    if (c.fires(literals, mode)) neg += c.weight();
  }
  return pos - neg;
}

int BinaryWTM::predict(const BitVector& x) const {
  check_width(x.size());
  return predict(LiteralVector(x));
}

int BinaryWTM::predict(const LiteralVector& literals) const noexcept {
  return weighted_sum(literals, EvalMode::Classify) >= 0.0 ? 1 : 0;
}

void BinaryWTM::fit_example(const BitVector& x, int y, Rng& rng) {
  check_width(x.size());
  fit_example(LiteralVector(x), y, rng);
}

void BinaryWTM::fit_example(const LiteralVector& literals, int y, Rng& rng) {
  if (y != 0 && y != 1) throw ArgumentError("binary target must be 0 or 1");
  if (literals.features() != params_.features) check_width(literals.features());

  const std::size_t cp = positive_.size();
  outputs_.resize(cp + negative_.size());
  double pos = 0.0;
  for (std::size_t j = 0; j < cp; ++j) {
    outputs_[j] = positive_[j].fires(literals, EvalMode::Learn);
    if (outputs_[j]) pos += positive_[j].weight();
  }
  double neg = 0.0;
  for (std::size_t j = 0; j < negative_.size(); ++j) {
    outputs_[cp + j] = negative_[j].fires(literals, EvalMode::Learn);
    if (outputs_[cp + j]) neg += negative_[j].weight();
  }

  const double p = feedback_probability(y, clamp_sum(pos - neg, params_.threshold),
                                        params_.threshold);
  if (p <= 0.0) return;

  if (mask_.size() != 2 * params_.features) mask_ = FeedbackMask(2 * params_.features);

  const auto give = [&](Clause& c, bool output, FeedbackKind kind) {
    if (kind == FeedbackKind::TypeI) {
      fill_mask(params_.sampler, rng, params_.p_s, mask_);
      apply_type_i(c, literals, output, mask_);
    } else {
      apply_type_ii(c, literals, output);
    }
    if (output && params_.gamma != 0.0) c.set_weight(update_weight(c.weight(), kind, params_.gamma));
  };

  const FeedbackKind positive_kind = y == 1 ? FeedbackKind::TypeI : FeedbackKind::TypeII;
  const FeedbackKind negative_kind = y == 1 ? FeedbackKind::TypeII : FeedbackKind::TypeI;
  for (std::size_t j = 0; j < cp; ++j) {
    if (rng.uniform01() < p) give(positive_[j], outputs_[j] != 0, positive_kind);
  }
  for (std::size_t j = 0; j < negative_.size(); ++j) {
    if (rng.uniform01() < p) give(negative_[j], outputs_[cp + j] != 0, negative_kind);
  }
}

// MulticlassWTM ---------------------------------------------------------------

MulticlassWTM::MulticlassWTM(std::size_t classes, const WTMParams& params, Rng& rng) {
  if (classes < 2) throw ArgumentError("a multiclass machine needs at least two classes");
  machines_.reserve(classes);
  for (std::size_t i = 0; i < classes; ++i) machines_.emplace_back(params, rng);
}

MulticlassWTM::MulticlassWTM(std::vector<BinaryWTM> machines) : machines_(std::move(machines)) {
  if (machines_.size() < 2) throw ArgumentError("a multiclass machine needs at least two classes");
  for (const auto& m : machines_) {
    if (!(m.params() == machines_.front().params())) {
      throw ArgumentError("all class machines must share parameters");
    }
  }
}

std::vector<double> MulticlassWTM::class_sums(const BitVector& x) const {
  if (x.size() != params().features) {
    throw ArgumentError("input has " + std::to_string(x.size()) + " features, machine expects " +
                        std::to_string(params().features));
  }
  return class_sums(LiteralVector(x));
}

std::vector<double> MulticlassWTM::class_sums(const LiteralVector& literals) const {
  std::vector<double> sums(machines_.size());
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    sums[i] = machines_[i].weighted_sum(literals, EvalMode::Classify);
  }
  return sums;
}

std::size_t MulticlassWTM::predict(const BitVector& x) const { return argmax_lowest(class_sums(x)); }

std::size_t MulticlassWTM::predict(const LiteralVector& literals) const {
  return argmax_lowest(class_sums(literals));
}

void MulticlassWTM::fit_example(const BitVector& x, std::size_t y, Rng& rng,
                                NegativeSampling negatives) {
  if (x.size() != params().features) {
    throw ArgumentError("input has " + std::to_string(x.size()) + " features, machine expects " +
                        std::to_string(params().features));
  }
  fit_example(LiteralVector(x), y, rng, negatives);
}

void MulticlassWTM::fit_example(const LiteralVector& literals, std::size_t y, Rng& rng,
                                NegativeSampling negatives) {
  const std::size_t n = machines_.size();
  if (y >= n) {
    throw ArgumentError("label " + std::to_string(y) + " out of range for " + std::to_string(n) +
                        " classes");
  }
  machines_[y].fit_example(literals, 1, rng);
  if (negatives == NegativeSampling::AllOthers) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != y) machines_[i].fit_example(literals, 0, rng);
    }
    return;
  }
  std::size_t other = static_cast<std::size_t>(uniform_below(rng, n - 1));
  if (other >= y) ++other;
  machines_[other].fit_example(literals, 0, rng);
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("argmax of an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Training ----------------------------------------------------------------------

namespace {

std::vector<LiteralVector> expand(const BinaryDataset& data) {
  std::vector<LiteralVector> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.emplace_back(data.row(i));
  return out;
}

double accuracy_on(const MulticlassWTM& machine, std::span<const LiteralVector> rows,
                   std::span<const std::uint32_t> labels) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (machine.predict(rows[i]) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

void check_compatible(const MulticlassWTM& machine, const BinaryDataset& data, const char* what) {
  if (data.features() != machine.params().features) {
    throw ConfigError(std::string(what) + " set has " + std::to_string(data.features()) +
                      " features, machine expects " + std::to_string(machine.params().features));
  }
  if (data.classes() > machine.classes()) {
    throw ConfigError(std::string(what) + " set has " + std::to_string(data.classes()) +
                      " classes, machine has " + std::to_string(machine.classes()));
  }
}

void parallel_epoch(MulticlassWTM& machine, std::span<const LiteralVector> rows,
                    std::span<const std::uint32_t> labels, std::span<const std::size_t> order,
                    const TrainOptions& options, Rng& rng) {
  const std::size_t n = machine.classes();
  std::vector<std::size_t> others;
  if (options.negatives == NegativeSampling::RandomOther) {
    others.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::size_t other = static_cast<std::size_t>(uniform_below(rng, n - 1));
      if (other >= labels[order[i]]) ++other;
      others[i] = other;
    }
  }
  const std::uint64_t epoch_seed = rng.next_u64();
  const std::size_t workers = std::min(options.workers, n);

  auto work = [&](std::size_t worker) {
    for (std::size_t cls = worker; cls < n; cls += workers) {
      Rng class_rng(derive_seed(epoch_seed, cls));
      BinaryWTM& m = machine.machine(cls);
      for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t row = order[i];
        if (labels[row] == cls) {
          m.fit_example(rows[row], 1, class_rng);
        } else if (options.negatives == NegativeSampling::AllOthers || others[i] == cls) {
          m.fit_example(rows[row], 0, class_rng);
        }
      }
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
}

}  // namespace

std::vector<EpochMetrics> train_epochs(MulticlassWTM& machine, const BinaryDataset& train,
                                       const BinaryDataset* eval, const TrainOptions& options,
                                       Rng& rng,
                                       const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (train.empty()) throw ArgumentError("training set is empty");
  check_compatible(machine, train, "training");
  if (eval != nullptr) check_compatible(machine, *eval, "evaluation");
  if (options.workers == 0) throw ArgumentError("worker count must be >= 1");

  const auto rows = expand(train);
  const auto eval_rows = eval != nullptr ? expand(*eval) : std::vector<LiteralVector>{};
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochMetrics> history;
  history.reserve(options.epochs);
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (options.shuffle) shuffle_indices(rng, order);
    if (options.workers > 1) {
      parallel_epoch(machine, rows, train.labels(), order, options, rng);
    } else {
      for (const std::size_t row : order) {
        machine.fit_example(rows[row], train.label(row), rng, options.negatives);
      }
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.evaluate_train) m.train_accuracy = accuracy_on(machine, rows, train.labels());
    if (eval != nullptr) m.eval_accuracy = accuracy_on(machine, eval_rows, eval->labels());
    history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return history;
}

double accuracy(const MulticlassWTM& machine, const BinaryDataset& data) {
  check_compatible(machine, data, "evaluation");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (machine.predict(LiteralVector(data.row(i))) == data.label(i)) ++correct;
  }
  return data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
}

WeightStats weight_statistics(const BinaryWTM& machine) {
  WeightStats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = 0.0;
  double total = 0.0;
  for (const auto bank : {machine.positive(), machine.negative()}) {
    for (const auto& c : bank) {
      s.min = std::min(s.min, c.weight());
      s.max = std::max(s.max, c.weight());
      total += c.weight();
      ++s.count;
    }
  }
  s.mean = total / static_cast<double>(s.count);
  s.ratio = s.max / s.min;
  return s;
}

std::vector<WeightStats> weight_statistics(const MulticlassWTM& machine) {
  std::vector<WeightStats> out;
  out.reserve(machine.classes());
  for (std::size_t i = 0; i < machine.classes(); ++i) {
    out.push_back(weight_statistics(machine.machine(i)));
  }
  return out;
}

}  // namespace wtm
