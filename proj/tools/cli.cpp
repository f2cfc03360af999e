#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "wtm/data.hpp"
#include "wtm/errors.hpp"
#include "wtm/kernels.hpp"
#include "wtm/model_io.hpp"

namespace wtm::cli {
namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::ostream& err) {
  if (flag) return *flag;
  if (const char* env = std::getenv("WTM_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError(std::string("WTM_SEED is not an unsigned integer: ") + env);
  }
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << seed << '\n';
  return seed;
}

std::string format_accuracy(const std::optional<double>& a) {
  if (!a) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *a;
  return s.str();
}

struct ConvertArgs {
  std::string from;
  std::string input;
  std::string labels;
  std::string output;
  int threshold = kDefaultGrayThreshold;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  BinaryDataset data;
  if (a.from == "idx") {
    if (a.labels.empty()) throw ArgumentError("--labels is required for idx input");
    data = mnist_from_idx(a.input, a.labels, a.threshold);
  } else if (a.from == "connect4") {
    data = read_connect4(std::filesystem::path(a.input));
  } else {
    data = load_dataset(a.input, DatasetFormat::Text);
  }
  save_dataset(data, a.output);
  out << "wrote " << data.size() << " rows, " << data.features() << " features, "
      << data.classes() << " classes to " << a.output << '\n';
  return kOk;
}

struct TrainArgs {
  std::string train;
  std::string eval;
  std::string output;
  std::size_t clauses = 100;
  std::int32_t states = 100;
  std::int32_t threshold = 15;
  double p_s = 0.1;
  double gamma = 0.002;
  std::size_t epochs = 100;
  std::optional<std::uint64_t> seed;
  std::string sampler = "binomial";
  std::size_t workers = 1;
  bool shuffle = true;
  std::string negatives = "one";
  bool train_accuracy = true;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const BinaryDataset train = load_dataset(a.train);
  std::optional<BinaryDataset> eval;
  if (!a.eval.empty()) {
    eval = load_dataset(a.eval);
    if (eval->features() != train.features()) {
      throw ConfigError("evaluation set has " + std::to_string(eval->features()) +
                        " features, training set has " + std::to_string(train.features()));
    }
    if (eval->classes() != train.classes()) {
      throw ConfigError("evaluation set has " + std::to_string(eval->classes()) +
                        " classes, training set has " + std::to_string(train.classes()));
    }
  }

  WTMParams params = WTMParams::for_clauses(train.features(), a.clauses);
  params.states_per_action = a.states;
  params.threshold = a.threshold;
  params.p_s = a.p_s;
  params.gamma = a.gamma;
  params.sampler = a.sampler == "bernoulli" ? MaskSampler::Bernoulli : MaskSampler::BinomialUniform;
  params.validate();

  const std::uint64_t seed = resolve_seed(a.seed, err);
  Rng rng(seed);
  MulticlassWTM machine(train.classes(), params, rng);

  TrainOptions options;
  options.epochs = a.epochs;
  options.shuffle = a.shuffle;
  options.workers = a.workers;
  options.negatives = a.negatives == "all" ? NegativeSampling::AllOthers
                                           : NegativeSampling::RandomOther;
  options.evaluate_train = a.train_accuracy;

  out << "# epoch\ttrain_acc\teval_acc\tseconds\n";
  train_epochs(machine, train, eval ? &*eval : nullptr, options, rng,
               [&](const EpochMetrics& m) {
                 out << m.epoch << '\t' << format_accuracy(m.train_accuracy) << '\t'
                     << format_accuracy(m.eval_accuracy) << '\t' << std::fixed
                     << std::setprecision(3) << m.seconds << std::defaultfloat << '\n'
                     << std::flush;
               });

  const std::uint64_t checksum = save_model(machine, seed, a.output);
  err << "model written to " << a.output << " (checksum " << std::hex << std::setw(16)
      << std::setfill('0') << checksum << std::dec << std::setfill(' ') << ")\n";
  return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out) {
  const ModelFile model = load_model(model_path);
  const BinaryDataset data = load_dataset(data_path);
  const MulticlassWTM& m = model.machine;
  if (data.features() != m.params().features) {
    throw ConfigError("dataset has " + std::to_string(data.features()) +
                      " features, model expects " + std::to_string(m.params().features));
  }
  if (data.classes() > m.classes()) {
    throw ConfigError("dataset has " + std::to_string(data.classes()) + " classes, model has " +
                      std::to_string(m.classes()));
  }
  const std::size_t n = m.classes();
  std::vector<std::size_t> confusion(n * n, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t predicted = m.predict(data.row(i));
    ++confusion[data.label(i) * n + predicted];
    correct += predicted == data.label(i);
  }
  const double acc =
      data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
  out << "accuracy\t" << std::fixed << std::setprecision(4) << acc << std::defaultfloat << '\t'
      << correct << '/' << data.size() << '\n';
  out << "confusion (rows: true class, columns: predicted)\n";
  for (std::size_t t = 0; t < n; ++t) {
    out << t;
    for (std::size_t p = 0; p < n; ++p) out << '\t' << confusion[t * n + p];
    out << '\n';
  }
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, bool scores,
                std::ostream& out) {
  const ModelFile model = load_model(model_path);
  const BinaryDataset data = load_dataset(data_path);
  if (data.features() != model.machine.params().features) {
    throw ConfigError("dataset has " + std::to_string(data.features()) +
                      " features, model expects " +
                      std::to_string(model.machine.params().features));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto sums = model.machine.class_sums(data.row(i));
    out << argmax_lowest(sums);
    if (scores) {
      for (const double s : sums) out << '\t' << s;
    }
    out << '\n';
  }
  return kOk;
}

void print_stats(std::ostream& out, const std::string& label, const WeightStats& s) {
  out << label << "\tmin " << s.min << "\tmax " << s.max << "\tmean " << s.mean << "\tratio "
      << s.ratio << "\tclauses " << s.count << '\n';
}

struct InspectArgs {
  std::string model;
  std::optional<std::size_t> cls;
  std::optional<std::size_t> clause;
  bool histogram = true;
  std::size_t bins = 12;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const ModelFile model = load_model(a.model);
  const MulticlassWTM& m = model.machine;
  const WTMParams& p = m.params();
  out << "features " << p.features << "  classes " << m.classes() << "  clauses/class "
      << p.positive_clauses << "+" << p.negative_clauses << "  N " << p.states_per_action
      << "  T " << p.threshold << "  p_s " << p.p_s << "  gamma " << p.gamma << "  seed "
      << model.seed << '\n';

  if (a.cls && *a.cls >= m.classes()) {
    throw ArgumentError("class " + std::to_string(*a.cls) + " out of range (model has " +
                        std::to_string(m.classes()) + " classes)");
  }
  if (a.clause && !a.cls) throw ArgumentError("--clause requires --class");
  const std::size_t per_class = p.positive_clauses + p.negative_clauses;
  if (a.clause && *a.clause >= per_class) {
    throw ArgumentError("clause " + std::to_string(*a.clause) + " out of range (class has " +
                        std::to_string(per_class) + " clauses)");
  }

  const auto stats = weight_statistics(m);
  for (std::size_t c = 0; c < m.classes(); ++c) {
    if (!a.cls || *a.cls == c) print_stats(out, "class " + std::to_string(c), stats[c]);
  }

  if (a.cls) {
    const BinaryWTM& b = m.machine(*a.cls);
    const auto show = [&](std::size_t j) {
      const bool positive = j < p.positive_clauses;
      const Clause& c = positive ? b.positive()[j] : b.negative()[j - p.positive_clauses];
      out << (positive ? '+' : '-') << j << "\tw=" << c.weight() << '\t' << render_clause(c)
          << '\n';
    };
    if (a.clause) {
      show(*a.clause);
    } else {
      for (std::size_t j = 0; j < per_class; ++j) show(j);
    }
  }

  if (a.histogram) {
    std::vector<double> weights;
    for (std::size_t c = 0; c < m.classes(); ++c) {
      if (a.cls && *a.cls != c) continue;
      for (const auto bank : {m.machine(c).positive(), m.machine(c).negative()}) {
        for (const auto& cl : bank) weights.push_back(cl.weight());
      }
    }
    out << "weight histogram (log bins)\n" << weight_histogram(weights, a.bins);
  }
  return kOk;
}

struct BenchArgs {
  std::size_t u = 1568;
  double p = 0.1;
  std::size_t iterations = 20000;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.u == 0) throw ArgumentError("u must be >= 1");
  if (!(a.p >= 0.0 && a.p <= 1.0)) throw ArgumentError("p must lie in [0, 1]");
  const auto r = bench_sampling(a.u, a.p, a.iterations, a.seed);
  out << "u " << a.u << "  p " << a.p << "  iterations " << a.iterations << '\n';
  out << "sampler\tns/call\tdraws/call\tbits/call\n";
  out << std::fixed << std::setprecision(1);
  out << "binomial\t" << r.binomial.seconds_per_call * 1e9 << '\t' << std::setprecision(2)
      << r.binomial.draws_per_call << '\t' << r.binomial.bits_per_call << '\n';
  out << std::setprecision(1) << "bernoulli\t" << r.bernoulli.seconds_per_call * 1e9 << '\t'
      << std::setprecision(2) << r.bernoulli.draws_per_call << '\t' << r.bernoulli.bits_per_call
      << '\n';
  out << "speedup\t" << r.speedup << "x\n" << std::defaultfloat;
  return kOk;
}

int map_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

std::string render_clause(const Clause& clause) {
  const auto lits = clause.included_literals();
  if (lits.empty()) return "(empty)";
  const std::size_t o = clause.features();
  std::string s;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i > 0) s += " ∧ ";
    if (lits[i] < o) {
      s += "x" + std::to_string(lits[i] + 1);
    } else {
      s += "¬x" + std::to_string(lits[i] - o + 1);
    }
  }
  return s;
}

SamplingBenchmark bench_sampling(std::size_t u, double p, std::size_t iterations,
                                 std::uint64_t seed) {
  if (iterations == 0) throw ArgumentError("iterations must be >= 1");
  using clock = std::chrono::steady_clock;
  FeedbackMask mask(u);
  volatile std::size_t sink = 0;

  const auto measure = [&](MaskSampler sampler, Rng& rng, std::size_t calls) {
    const auto start = clock::now();
    for (std::size_t i = 0; i < calls; ++i) {
      fill_mask(sampler, rng, p, mask);
      sink = sink + (mask.words()[0] & 1U);
    }
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  SamplingBenchmark r;
  Rng bin_rng(derive_seed(seed, 0));
  Rng ber_rng(derive_seed(seed, 1));
  // Warm-up, then the best of several interleaved rounds to damp scheduler noise.
  measure(MaskSampler::BinomialUniform, bin_rng, std::max<std::size_t>(iterations / 10, 1));
  measure(MaskSampler::Bernoulli, ber_rng, std::max<std::size_t>(iterations / 10, 1));

  constexpr int kRounds = 5;
  const std::size_t per_round = std::max<std::size_t>(iterations / kRounds, 1);
  double best_bin = INFINITY, best_ber = INFINITY;
  std::uint64_t bin_draws = 0, ber_draws = 0;
  std::size_t bin_bits = 0, ber_bits = 0;
  for (int round = 0; round < kRounds; ++round) {
    auto before = bin_rng.draw_count();
    best_bin = std::min(best_bin, measure(MaskSampler::BinomialUniform, bin_rng, per_round));
    bin_draws += bin_rng.draw_count() - before;
    bin_bits += mask.count();
    before = ber_rng.draw_count();
    best_ber = std::min(best_ber, measure(MaskSampler::Bernoulli, ber_rng, per_round));
    ber_draws += ber_rng.draw_count() - before;
    ber_bits += mask.count();
  }
  const double calls = static_cast<double>(per_round) * kRounds;
  r.binomial.seconds_per_call = best_bin / static_cast<double>(per_round);
  r.bernoulli.seconds_per_call = best_ber / static_cast<double>(per_round);
  r.binomial.draws_per_call = static_cast<double>(bin_draws) / calls;
  r.bernoulli.draws_per_call = static_cast<double>(ber_draws) / calls;
  r.binomial.bits_per_call = static_cast<double>(bin_bits) / kRounds;
  r.bernoulli.bits_per_call = static_cast<double>(ber_bits) / kRounds;
  r.speedup = r.bernoulli.seconds_per_call / r.binomial.seconds_per_call;
  return r;
}

std::string weight_histogram(const std::vector<double>& weights, std::size_t bins,
                             std::size_t width) {
  if (weights.empty()) return "";
  bins = std::max<std::size_t>(bins, 1);
  const auto [lo_it, hi_it] = std::minmax_element(weights.begin(), weights.end());
  const double lo = std::log(*lo_it);
  const double hi = std::log(*hi_it);
  if (hi - lo < 1e-12) bins = 1;
  const double step = bins == 1 ? 1.0 : (hi - lo) / static_cast<double>(bins);

  std::vector<std::size_t> counts(bins, 0);
  for (const double w : weights) {
    auto b = static_cast<std::size_t>((std::log(w) - lo) / step);
    counts[std::min(b, bins - 1)] += 1;
  }
  const std::size_t peak = *std::max_element(counts.begin(), counts.end());

  std::ostringstream s;
  s << std::setprecision(3);
  for (std::size_t b = 0; b < bins; ++b) {
    const double from = std::exp(lo + step * static_cast<double>(b));
    const double to = bins == 1 ? *hi_it : std::exp(lo + step * static_cast<double>(b + 1));
    const std::size_t bar = peak == 0 ? 0 : (counts[b] * width + peak - 1) / peak;
    s << '[' << std::setw(8) << from << ", " << std::setw(8) << to << ")  " << std::setw(6)
      << counts[b] << "  " << std::string(bar, '#') << '\n';
  }
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Tsetlin machine toolkit", "wtm"};
  app.require_subcommand(1);
  std::optional<std::string> kernels_name;
  app.add_option("--kernels", kernels_name, "Bit kernels: scalar, avx2 or auto")
      ->check(CLI::IsMember({"scalar", "avx2", "auto"}));

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Convert a dataset to WTMD");
  convert->add_option("--from", conv.from, "Input format")
      ->required()
      ->check(CLI::IsMember({"idx", "connect4", "text"}));
  convert->add_option("input", conv.input, "Input file (IDX images for --from idx)")->required();
  convert->add_option("--labels", conv.labels, "IDX label file");
  convert->add_option("--threshold", conv.threshold, "Grayscale binarization threshold")
      ->check(CLI::Range(0, 255));
  convert->add_option("-o,--output", conv.output, "Output WTMD file")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a multiclass machine");
  train->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  train->add_option("train", tr.train, "Training dataset")->required();
  train->add_option("--eval", tr.eval, "Evaluation dataset reported after each epoch");
  train->add_option("-o,--output", tr.output, "Output model file")->required();
  train->add_option("--clauses", tr.clauses, "Clauses per class, split evenly by polarity")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--states", tr.states, "States per action N")->capture_default_str();
  train->add_option("--threshold", tr.threshold, "Summation target T")->capture_default_str();
  train->add_option("--ps", tr.p_s, "Type I event probability")->capture_default_str();
  train->add_option("--gamma", tr.gamma, "Weight learning rate")->capture_default_str();
  train->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  train->add_option("--seed", tr.seed, "Random seed (falls back to WTM_SEED)");
  train->add_option("--sampler", tr.sampler, "Type I mask sampler")
      ->capture_default_str()
      ->check(CLI::IsMember({"binomial", "bernoulli"}));
  train->add_option("--workers", tr.workers, "Train classes in parallel (changes the stream)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_flag("--shuffle,!--no-shuffle", tr.shuffle, "Shuffle rows every epoch");
  train->add_option("--negatives", tr.negatives, "Non-target classes per example")
      ->capture_default_str()
      ->check(CLI::IsMember({"one", "all"}));
  train->add_flag("!--no-train-accuracy", tr.train_accuracy,
                  "Skip the training-set accuracy pass");

  std::string model_path, data_path;
  auto* eval = app.add_subcommand("eval", "Accuracy and confusion counts on a dataset");
  eval->add_option("model", model_path, "Model file")->required();
  eval->add_option("data", data_path, "Dataset")->required();

  bool scores = false;
  auto* predict = app.add_subcommand("predict", "Predicted class per row");
  predict->add_option("model", model_path, "Model file")->required();
  predict->add_option("data", data_path, "Dataset")->required();
  predict->add_flag("--scores", scores, "Append the per-class weighted sums");

  InspectArgs ins;
  auto* inspect = app.add_subcommand("inspect", "Weight statistics and clause listing");
  inspect->add_option("model", ins.model, "Model file")->required();
  inspect->add_option("--class", ins.cls, "Restrict to one class and list its clauses");
  inspect->add_option("--clause", ins.clause, "Show one clause of --class");
  inspect->add_option("--bins", ins.bins, "Histogram bins")->check(CLI::PositiveNumber);
  inspect->add_flag("!--no-histogram", ins.histogram, "Omit the weight histogram");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-sampling", "Compare Type I mask samplers");
  bench_cmd->add_option("--u", bench.u, "Mask length")->capture_default_str();
  bench_cmd->add_option("--p", bench.p, "Selection probability")->capture_default_str();
  bench_cmd->add_option("--iterations", bench.iterations, "Calls per sampler")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Random seed")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (kernels_name && !kernels::select(*kernels_name)) {
      throw ArgumentError("kernel variant '" + *kernels_name + "' is not available on this CPU");
    }
    if (*convert) return cmd_convert(conv, out);
    if (*train) return cmd_train(tr, out, err);
    if (*eval) return cmd_eval(model_path, data_path, out);
    if (*predict) return cmd_predict(model_path, data_path, scores, out);
    if (*inspect) return cmd_inspect(ins, out);
    if (*bench_cmd) return cmd_bench(bench, out);
  } catch (...) {
    return map_exception(err);
  }
  return kUsage;
}

}  // namespace wtm::cli
