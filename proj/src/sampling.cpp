#include "wtm/sampling.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "wtm/errors.hpp"

namespace wtm {

namespace {

__extension__ using u128 = unsigned __int128;

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("probability must lie in [0, 1], got " + std::to_string(p));
  }
}

// CDF walk for Binomial(n, p) with p <= 0.5. Consumes exactly one draw.
std::uint64_t binomial_inversion(Rng& rng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::pow(q, static_cast<double>(n));
  double u = rng.uniform01();
  std::uint64_t x = 0;
  while (u > pmf) {
    u -= pmf;
    if (x == n) {
      // Only reachable through accumulated rounding in the tail.
      break;
    }
    ++x;
    pmf *= ratio * static_cast<double>(n - x + 1) / static_cast<double>(x);
  }
  return x;
}

double stirling_tail(double v) {
  const double v2 = v * v;
  return (13680. - (462. - (132. - (99. - 140. / v2) / v2) / v2) / v2) / v / 166320.;
}

// Kachitvichyanukul & Schmeiser BTPE, p <= 0.5 and n * p > 30.
std::uint64_t binomial_btpe(Rng& rng, std::uint64_t trials, double p) {
  const double n = static_cast<double>(trials);
  const double r = p;
  const double q = 1.0 - r;
  const double fm = n * r + r;
  const double m = std::floor(fm);
  const double nrq = n * r * q;
  const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
  const double xm = m + 0.5;
  const double xl = xm - p1;
  const double xr = xm + p1;
  const double c = 0.134 + 20.5 / (15.3 + m);
  double a = (fm - xl) / (fm - xl * r);
  const double laml = a * (1.0 + a / 2.0);
  a = (xr - fm) / (xr * q);
  const double lamr = a * (1.0 + a / 2.0);
  const double p2 = p1 * (1.0 + 2.0 * c);
  const double p3 = p2 + c / laml;
  const double p4 = p3 + c / lamr;

  for (;;) {
    const double u = rng.uniform01() * p4;
    double v = rng.uniform01();
    double y;
    if (u <= p1) {
      return static_cast<std::uint64_t>(std::floor(xm - p1 * v + u));
    }
    if (u <= p2) {
      const double x = xl + (u - p1) / c;
      v = v * c + 1.0 - std::fabs(m - x + 0.5) / p1;
      if (v > 1.0) continue;
      y = std::floor(x);
    } else if (u <= p3) {
      y = std::floor(xl + std::log(v) / laml);
      if (y < 0.0) continue;
      v = v * (u - p2) * laml;
    } else {
      y = std::floor(xr - std::log(v) / lamr);
      if (y > n) continue;
      v = v * (u - p3) * lamr;
    }

    const double k = std::fabs(y - m);
    if (!(k > 20.0 && k < nrq / 2.0 - 1.0)) {
      // Explicit evaluation of f(y) / f(m).
      const double s = r / q;
      const double aa = s * (n + 1.0);
      double f = 1.0;
      if (m < y) {
        for (double i = m + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
      } else if (m > y) {
        for (double i = y + 1.0; i <= m; i += 1.0) f /= (aa / i - s);
      }
      if (v > f) continue;
      return static_cast<std::uint64_t>(y);
    }

    // Squeeze on log f(y) / f(m), then the Stirling-corrected bound.
    const double rho = (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.1666666666666) / nrq + 0.5);
    const double t = -k * k / (2.0 * nrq);
    const double log_v = std::log(v);
    if (log_v < t - rho) return static_cast<std::uint64_t>(y);
    if (log_v > t + rho) continue;

    const double x1 = y + 1.0;
    const double f1 = m + 1.0;
    const double z = n + 1.0 - m;
    const double w = n - y + 1.0;
    const double bound = xm * std::log(f1 / x1) + (n - m + 0.5) * std::log(z / w) +
                         (y - m) * std::log(w * r / (x1 * q)) + stirling_tail(f1) +
                         stirling_tail(z) + stirling_tail(x1) + stirling_tail(w);
    if (log_v > bound) continue;
    return static_cast<std::uint64_t>(y);
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t x = master ^ (index * 0xd1b54a32d192ed03ULL);
  splitmix64(x);
  return splitmix64(x);
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) word = splitmix64(x);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept {
  u128 m = static_cast<u128>(rng.next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng.next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw ArgumentError("uniform_int: empty range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  const std::uint64_t offset =
      span == ~std::uint64_t{0} ? rng.next_u64() : uniform_below(rng, span + 1);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + offset);
}

std::uint64_t binomial_draw(Rng& rng, std::uint64_t trials, double p) {
  check_probability(p);
  const bool flip = p > 0.5;
  const double r = flip ? 1.0 - p : p;
  const std::uint64_t x = static_cast<double>(trials) * r <= 30.0
                              ? binomial_inversion(rng, trials, r)
                              : binomial_btpe(rng, trials, r);
  return flip ? trials - x : x;
}

void FeedbackMask::fill() noexcept {
  std::fill(words_.begin(), words_.end(), ~std::uint64_t{0});
  if (const std::size_t tail = size_ & 63; tail != 0) {
    words_.back() = (std::uint64_t{1} << tail) - 1;
  }
}

std::size_t FeedbackMask::count() const noexcept {
  std::size_t n = 0;
  for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

void binomial_uniform_fill(Rng& rng, double p, FeedbackMask& mask) {
  mask.clear();
  const std::size_t u = mask.size();
  const std::uint64_t q = binomial_draw(rng, u, p);
  std::uint64_t k = 0;
  while (k < q) {
    const auto v = static_cast<std::size_t>(uniform_below(rng, u));
    if (!mask.test(v)) {
      mask.set(v);
      ++k;
    }
  }
}

void bernoulli_fill(Rng& rng, double p, FeedbackMask& mask) {
  check_probability(p);
  mask.clear();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (rng.uniform01() < p) mask.set(i);
  }
}

FeedbackMask binomial_uniform_mask(Rng& rng, std::size_t u, double p) {
  if (u == 0) throw ArgumentError("binomial_uniform_mask: mask length must be >= 1");
  FeedbackMask mask(u);
  binomial_uniform_fill(rng, p, mask);
  return mask;
}

FeedbackMask bernoulli_mask(Rng& rng, std::size_t u, double p) {
  if (u == 0) throw ArgumentError("bernoulli_mask: mask length must be >= 1");
  FeedbackMask mask(u);
  bernoulli_fill(rng, p, mask);
  return mask;
}

void shuffle_indices(Rng& rng, std::span<std::size_t> indices) noexcept {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace wtm
