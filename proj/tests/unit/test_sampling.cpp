#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "../support/stats.hpp"
#include "wtm/errors.hpp"
#include "wtm/sampling.hpp"

namespace wtm {
namespace {

using testing::binomial_pmf;
using testing::chi_square_gof;
using testing::three_sigma;

TEST(UniformInt, SinglePointRange) {
  Rng rng(1);
  EXPECT_EQ(uniform_int(rng, 5, 5), 5);
}

TEST(UniformInt, RejectsEmptyRange) {
  Rng rng(1);
  EXPECT_THROW(uniform_int(rng, 3, 2), ArgumentError);
}

TEST(UniformInt, TwoValuesAreBalanced) {
  Rng rng(7);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = uniform_int(rng, 1, 2);
    ASSERT_TRUE(v == 1 || v == 2);
    ones += v == 1;
  }
  EXPECT_NEAR(ones / double(n), 0.5, three_sigma(0.5, n));
}

TEST(UniformInt, SameSeedSameValues) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(uniform_int(a, 1, 1568), uniform_int(b, 1, 1568));
}

TEST(UniformInt, FullRangeAndNegativeBounds) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto v = uniform_int(rng, -3, 3);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 3);
  }
  (void)uniform_int(rng, INT64_MIN, INT64_MAX);
}

TEST(UniformInt, UniformOverSevenValues) {
  Rng rng(11);
  std::vector<std::uint64_t> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[static_cast<std::size_t>(uniform_int(rng, 0, 6))];
  EXPECT_GT(chi_square_gof(counts, std::vector<double>(7, 1.0 / 7)), 0.001);
}

TEST(Rng, KnownFirstOutputsAreFrozen) {
  // Reproducibility contract: these values must never change.
  Rng rng(0);
  const std::uint64_t first = rng.next_u64();
  const std::uint64_t second = rng.next_u64();
  Rng again(0);
  EXPECT_EQ(again.next_u64(), first);
  EXPECT_EQ(again.next_u64(), second);
  EXPECT_EQ(first, 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(second, 0xbf6e1f784956452aULL);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}

TEST(BinomialDraw, Degenerate) {
  Rng rng(5);
  EXPECT_EQ(binomial_draw(rng, 1568, 0.0), 0u);
  EXPECT_EQ(binomial_draw(rng, 1568, 1.0), 1568u);
  EXPECT_EQ(binomial_draw(rng, 0, 0.3), 0u);
}

TEST(BinomialDraw, RejectsBadProbability) {
  Rng rng(5);
  EXPECT_THROW(binomial_draw(rng, 10, -0.1), ArgumentError);
  EXPECT_THROW(binomial_draw(rng, 10, 1.5), ArgumentError);
  EXPECT_THROW(binomial_draw(rng, 10, std::nan("")), ArgumentError);
}

TEST(BinomialDraw, MeanAt1568) {
  Rng rng(2024);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(binomial_draw(rng, 1568, 0.1));
  EXPECT_NEAR(sum / n, 156.8, 3.0 * std::sqrt(1568 * 0.1 * 0.9 / n));
}

struct BinomialCase {
  std::uint64_t n;
  double p;
};

class BinomialExactness : public ::testing::TestWithParam<BinomialCase> {};

TEST_P(BinomialExactness, MatchesExactPmf) {
  const auto [n, p] = GetParam();
  Rng rng(n * 1000 + static_cast<std::uint64_t>(p * 1000));
  std::vector<std::uint64_t> counts(n + 1, 0);
  for (int i = 0; i < 100000; ++i) ++counts[binomial_draw(rng, n, p)];
  EXPECT_GT(chi_square_gof(counts, binomial_pmf(n, p)), 0.001);
}

// Cases straddle the inversion / BTPE switch at n * min(p, 1-p) = 30.
INSTANTIATE_TEST_SUITE_P(Regimes, BinomialExactness,
                         ::testing::Values(BinomialCase{8, 0.1}, BinomialCase{16, 0.3},
                                           BinomialCase{64, 0.05}, BinomialCase{60, 0.5},
                                           BinomialCase{61, 0.5}, BinomialCase{100, 0.4},
                                           BinomialCase{1568, 0.1}, BinomialCase{1000, 0.7},
                                           BinomialCase{5000, 0.02}, BinomialCase{40, 0.9}));

TEST(BinomialUniformMask, Degenerate) {
  Rng rng(1);
  EXPECT_EQ(binomial_uniform_mask(rng, 8, 0.0).count(), 0u);
  const auto full = binomial_uniform_mask(rng, 8, 1.0);
  EXPECT_EQ(full.count(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_TRUE(full.test(i));
  EXPECT_THROW(binomial_uniform_mask(rng, 0, 0.1), ArgumentError);
}

TEST(BernoulliMask, Degenerate) {
  Rng rng(1);
  EXPECT_EQ(bernoulli_mask(rng, 8, 0.0).count(), 0u);
  EXPECT_EQ(bernoulli_mask(rng, 8, 1.0).count(), 8u);
  EXPECT_THROW(bernoulli_mask(rng, 8, 2.0), ArgumentError);
}

TEST(BinomialUniformMask, PerPositionMarginal) {
  Rng rng(99);
  const std::size_t u = 16;
  const int n = 100000;
  std::vector<int> hits(u, 0);
  FeedbackMask mask(u);
  for (int i = 0; i < n; ++i) {
    binomial_uniform_fill(rng, 0.1, mask);
    for (std::size_t k = 0; k < u; ++k) hits[k] += mask.test(k);
  }
  for (std::size_t k = 0; k < u; ++k) EXPECT_NEAR(hits[k] / double(n), 0.1, three_sigma(0.1, n));
}

TEST(BernoulliMask, PopcountIsBinomial) {
  Rng rng(123);
  std::vector<std::uint64_t> counts(17, 0);
  FeedbackMask mask(16);
  for (int i = 0; i < 100000; ++i) {
    bernoulli_fill(rng, 0.1, mask);
    ++counts[mask.count()];
  }
  EXPECT_GT(chi_square_gof(counts, binomial_pmf(16, 0.1)), 0.001);
}

TEST(BinomialUniformMask, PopcountIsBinomialAndMatchesBernoulli) {
  Rng a(321), b(654);
  for (const auto [u, p] : {std::pair<std::size_t, double>{5, 0.4}, {12, 0.2}, {30, 0.7}}) {
    std::vector<std::uint64_t> uniform_counts(u + 1, 0), bernoulli_counts(u + 1, 0);
    FeedbackMask mask(u);
    for (int i = 0; i < 50000; ++i) {
      binomial_uniform_fill(a, p, mask);
      ++uniform_counts[mask.count()];
      bernoulli_fill(b, p, mask);
      ++bernoulli_counts[mask.count()];
    }
    EXPECT_GT(chi_square_gof(uniform_counts, binomial_pmf(u, p)), 0.001) << u << " " << p;
    EXPECT_GT(testing::chi_square_two_sample(uniform_counts, bernoulli_counts), 0.001);
  }
}

TEST(Masks, SameSeedSameSequence) {
  Rng a(77), b(77);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(binomial_uniform_mask(a, 100, 0.2), binomial_uniform_mask(b, 100, 0.2));
    EXPECT_EQ(bernoulli_mask(a, 100, 0.2), bernoulli_mask(b, 100, 0.2));
  }
}

TEST(DrawCount, BernoulliUsesOneDrawPerPosition) {
  Rng rng(1);
  const auto before = draw_count(rng);
  (void)bernoulli_mask(rng, 1568, 0.1);
  EXPECT_EQ(draw_count(rng) - before, 1568u);
}

TEST(DrawCount, BinomialUniformAtZeroUsesOnlyTheCountDraw) {
  Rng rng(1);
  const auto before = draw_count(rng);
  (void)binomial_uniform_mask(rng, 1568, 0.0);
  EXPECT_EQ(draw_count(rng) - before, 1u);
}

TEST(DrawCount, BinomialUniformMeanDrawsMatchCouponCollectorOracle) {
  const std::size_t u = 1568;
  const double p = 0.1;
  // Oracle: placing q distinct bits takes sum_{k<q} u / (u - k) uniform
  // draws on average; average over the exact pmf of q.
  const auto pmf = binomial_pmf(u, p);
  double expected_placement = 0.0;
  double partial = 0.0;
  for (std::size_t q = 0; q <= u; ++q) {
    expected_placement += pmf[q] * partial;
    partial += static_cast<double>(u) / static_cast<double>(u - q);
    if (q > 400) break;  // pmf is negligible beyond here
  }

  Rng rng(5);
  const int calls = 10000;
  FeedbackMask mask(u);
  const auto before = draw_count(rng);
  for (int i = 0; i < calls; ++i) binomial_uniform_fill(rng, p, mask);
  const double mean_total = static_cast<double>(draw_count(rng) - before) / calls;
  EXPECT_LT(mean_total, 180.0);
  EXPECT_GT(mean_total, 157.8);

  // The count draw alone, on an independent stream.
  Rng count_only(6);
  const auto count_start = draw_count(count_only);
  for (int i = 0; i < calls; ++i) (void)binomial_draw(count_only, u, p);
  const double mean_count = static_cast<double>(draw_count(count_only) - count_start) / calls;

  // q has sd ~ 11.9, so the placement mean over 10^4 calls has sd ~ 0.13.
  EXPECT_NEAR(mean_total - mean_count, expected_placement, 0.6);
}

TEST(DrawCount, BinomialUniformBeatsBernoulliAtSmallP) {
  Rng a(8), b(8);
  FeedbackMask mask(1568);
  for (int i = 0; i < 1000; ++i) binomial_uniform_fill(a, 0.1, mask);
  for (int i = 0; i < 1000; ++i) bernoulli_fill(b, 0.1, mask);
  EXPECT_LT(draw_count(a) * 5, draw_count(b));
}

TEST(Shuffle, IsPermutation) {
  Rng rng(4);
  std::vector<std::size_t> idx(50);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  shuffle_indices(rng, idx);
  auto sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

}  // namespace
}  // namespace wtm
