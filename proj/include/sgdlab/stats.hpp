#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sgdlab/error.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

inline double erf(double x) { return std::erf(x); }

/// Inverse of erf by bisection to 1e-10.
inline double erf_inv(double y) {
  if (!(y > -1.0 && y < 1.0)) throw InvalidArgument("erf_inv: argument must lie in (-1, 1)");
  double lo = -6.0;
  double hi = 6.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (std::erf(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double level = 0.95) {
  if (trials == 0) throw InvalidArgument("wilson_ci: trials must be >= 1");
  if (successes > trials) throw InvalidArgument("wilson_ci: successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("wilson_ci: level must lie in (0, 1)");
  const double z = std::sqrt(2.0) * erf_inv(level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  return ci;
}

struct MeanCI {
  double mean = 0.0;
  double sd = 0.0;
  double half_width = 0.0;  // normal approximation at 95%
  std::size_t n = 0;
};

/// Sample mean with a 95% normal interval; values are summed in index order.
inline MeanCI mean_ci(const std::vector<double>& xs) {
  MeanCI r;
  r.n = xs.size();
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    r.half_width = 1.959963984540054 * r.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return r;
}

/// Analytic bound against a Monte Carlo estimate; pass iff empirical - 3 CI <= analytic.
struct BoundReport {
  double analytic = 0.0;
  double empirical = 0.0;
  double ci_half_width = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  bool pass = false;

  static BoundReport make(double analytic, std::uint64_t successes, std::uint64_t trials) {
    BoundReport r;
    r.analytic = analytic;
    r.successes = successes;
    r.trials = trials;
    r.empirical = static_cast<double>(successes) / static_cast<double>(trials);
    r.ci_half_width = wilson_ci(successes, trials).half_width();
    r.pass = r.empirical - 3.0 * r.ci_half_width <= analytic;
    return r;
  }
};

// ---------------------------------------------------------------------------
// Triangular walk sums: X_t = c (T - t)/T * x_t, x_t in {1, -1, 0} w.p. 1/4, 1/4, 1/2
// ---------------------------------------------------------------------------

inline double berry_esseen_bound(double c, std::size_t k, double a, std::size_t T) {
  if (k < 1) throw InvalidArgument("berry_esseen_bound: k must be >= 1");
  if (T <= 2 * k) throw InvalidArgument("berry_esseen_bound: requires T > 2k");
  if (!(a >= 0.0)) throw InvalidArgument("berry_esseen_bound: a must be >= 0");
  if (!(c > 0.0)) throw InvalidArgument("berry_esseen_bound: c must be > 0");
  return erf(a) + std::sqrt(125000.0 * static_cast<double>(k) / static_cast<double>(T));
}

namespace detail {

/// sum over set bits j (0-based) of j, via bit-plane popcounts.
inline std::uint64_t weighted_popcount(std::uint64_t word) {
  static constexpr std::array<std::uint64_t, 6> planes = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  std::uint64_t s = 0;
  for (std::size_t b = 0; b < planes.size(); ++b) {
    s += static_cast<std::uint64_t>(std::popcount(word & planes[b])) << b;
  }
  return s;
}

/// sum_{t=1..n} (T - t) u_t for independent uniform signs u_t.
inline std::int64_t signed_weighted_sum(Rng& rng, std::size_t n, std::size_t T) {
  // Bit j of word w encodes u_t = +1 for t = 64 w + j + 1.
  std::int64_t set_weight = 0;
  for (std::size_t base = 0; base < n; base += 64) {
    std::uint64_t word = rng();
    const std::size_t len = std::min<std::size_t>(64, n - base);
    if (len < 64) word &= (std::uint64_t{1} << len) - 1;
    const auto pc = static_cast<std::int64_t>(std::popcount(word));
    const auto tsum = static_cast<std::int64_t>(weighted_popcount(word)) +
                      pc * static_cast<std::int64_t>(base + 1);
    set_weight += pc * static_cast<std::int64_t>(T) - tsum;
  }
  const auto Ti = static_cast<std::int64_t>(T);
  const auto ni = static_cast<std::int64_t>(n);
  const std::int64_t total = ni * Ti - ni * (ni + 1) / 2;
  return 2 * set_weight - total;
}

}  // namespace detail

/// Index-set size floor(T / k).
inline std::size_t be_index_count(std::size_t k, std::size_t T) { return T / k; }

/// Draws 2 * sum_{t in I} (T - t) x_t exactly, using x_t = (u_t + v_t)/2.
inline std::vector<std::int64_t> be_sample_sums(std::size_t k, std::size_t T, std::size_t trials,
                                                std::uint64_t seed) {
  if (k < 1 || T <= 2 * k) throw InvalidArgument("be_sample_sums: requires k >= 1 and T > 2k");
  const std::size_t n = be_index_count(k, T);
  return parallel_map(trials, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    return detail::signed_weighted_sum(rng, n, T) + detail::signed_weighted_sum(rng, n, T);
  });
}

/// Fraction of draws with |T^{-1/2} sum X_t| < a c / sqrt(50 k); the c cancels.
inline std::uint64_t be_count_inside(const std::vector<std::int64_t>& twice_sums, std::size_t k,
                                     double a, std::size_t T) {
  const double Td = static_cast<double>(T);
  const double threshold = 2.0 * a * Td * std::sqrt(Td) / std::sqrt(50.0 * static_cast<double>(k));
  std::uint64_t inside = 0;
  for (std::int64_t s : twice_sums) {
    inside += std::abs(static_cast<double>(s)) < threshold;
  }
  return inside;
}

inline BoundReport be_empirical_check(double c, std::size_t k, double a, std::size_t T,
                                      std::size_t trials, std::uint64_t seed) {
  const double bound = berry_esseen_bound(c, k, a, T);
  if (trials == 0) throw InvalidArgument("be_empirical_check: trials must be >= 1");
  const auto sums = be_sample_sums(k, T, trials, seed);
  return BoundReport::make(bound, be_count_inside(sums, k, a, T), trials);
}

struct BeGridRow {
  double c = 0.0;
  std::size_t k = 0;
  double a = 0.0;
  BoundReport report;
};

/// One set of sums per k, reused across every (a, c) on the grid.
inline std::vector<BeGridRow> be_grid_check(const std::vector<double>& as, const std::vector<std::size_t>& ks,
                                            const std::vector<double>& cs, std::size_t T, std::size_t trials,
                                            std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("be_grid_check: trials must be >= 1");
  std::vector<BeGridRow> rows;
  for (std::size_t k : ks) {
    const auto sums = be_sample_sums(k, T, trials, derive_seed(seed, k));
    for (double c : cs) {
      for (double a : as) {
        const auto inside = be_count_inside(sums, k, a, T);
        rows.push_back({c, k, a, BoundReport::make(berry_esseen_bound(c, k, a, T), inside, trials)});
      }
    }
  }
  return rows;
}

/// Exact variance of sum_{t in I} X_t.
inline double be_exact_variance(double c, std::size_t k, std::size_t T) {
  const std::size_t n = be_index_count(k, T);
  double v = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    const double w = c * static_cast<double>(T - t) / static_cast<double>(T);
    v += 0.5 * w * w;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Exit time of the square walk
// ---------------------------------------------------------------------------

inline double hoeffding_exit_bound(double alpha, double c) {
  if (!(alpha > 0.0) || !(c > 0.0)) throw InvalidArgument("hoeffding_exit_bound: alpha, c must be > 0");
  return 8.0 * std::exp(-alpha * c / 32.0);
}

/// Number of walks that leave |w_i| <= 1/4 within `max_steps` iterates. Each step picks one
/// of the four directions +-eta e_1, +-eta e_2 uniformly; the first coordinate moves only
/// while the walk is inside the square.
inline std::uint64_t count_walk_exits(double eta, std::size_t max_steps, std::size_t trials,
                                      std::uint64_t seed) {
  const auto exited = parallel_map(trials, [&](std::size_t i) -> int {
    Rng rng(derive_seed(seed, i));
    double w1 = 0.0;
    double w2 = 0.0;
    for (std::size_t t = 1; t < max_steps; ++t) {
      const auto z = static_cast<int>(rng() >> 62);
      switch (z) {
        case 0: w1 -= eta; break;
        case 1: w1 += eta; break;
        case 2: w2 -= eta; break;
        default: w2 += eta; break;
      }
      if (!(std::abs(w1) <= 0.25 && std::abs(w2) <= 0.25)) return 1;
    }
    return 0;
  });
  std::uint64_t n = 0;
  for (int e : exited) n += static_cast<std::uint64_t>(e);
  return n;
}

inline BoundReport exit_time_empirical(double alpha, double c, std::size_t T, std::size_t trials,
                                       std::uint64_t seed) {
  const double bound = hoeffding_exit_bound(alpha, c);
  if (T < 1 || trials < 1) throw InvalidArgument("exit_time_empirical: T and trials must be >= 1");
  const double eta = c / std::sqrt(static_cast<double>(T));
  const auto steps = static_cast<std::size_t>(std::floor(static_cast<double>(T) / (alpha * c)));
  return BoundReport::make(bound, count_walk_exits(eta, steps, trials, seed), trials);
}

}  // namespace sgdlab
