#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wtm/clause.hpp"
#include "wtm/machine.hpp"

namespace wtm::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kConfig = 4,
};

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "x1 ∧ x3 ∧ ¬x2"; an empty clause renders as "(empty)".
std::string render_clause(const Clause& clause);

struct SamplerTiming {
  double seconds_per_call = 0.0;
  double draws_per_call = 0.0;
  double bits_per_call = 0.0;
};

struct SamplingBenchmark {
  SamplerTiming binomial;
  SamplerTiming bernoulli;
  /// Bernoulli time / binomial-uniform time.
  double speedup = 0.0;
};

SamplingBenchmark bench_sampling(std::size_t u, double p, std::size_t iterations,
                                 std::uint64_t seed);

/// Logarithmically binned weight histogram as text, one line per bin.
std::string weight_histogram(const std::vector<double>& weights, std::size_t bins = 12,
                             std::size_t width = 40);

}  // namespace wtm::cli
