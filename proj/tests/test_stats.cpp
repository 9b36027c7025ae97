#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sgdlab/stats.hpp"

using namespace sgdlab;

namespace {
double erf_series(double x) {
  double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 2.0 / std::sqrt(std::numbers::pi) * sum;
}
}  // namespace

TEST(Erf, Values) {
  EXPECT_EQ(sgdlab::erf(0.0), 0.0);
  EXPECT_NEAR(sgdlab::erf(10.0), 1.0, 1e-7);
  EXPECT_NEAR(sgdlab::erf(1.0), 0.8427007929, 1e-7);
  EXPECT_NEAR(sgdlab::erf(1.0), erf_series(1.0), 1e-14);
}

TEST(Erf, MonotoneOddBounded) {
  double prev = -2;
  for (int i = 0; i < 10000; ++i) {
    const double x = -6.0 + 12.0 * i / 9999.0;
    const double e = sgdlab::erf(x);
    EXPECT_GE(e, prev);
    EXPECT_GE(e, -1.0);
    EXPECT_LE(e, 1.0);
    EXPECT_EQ(sgdlab::erf(-x), -e);
    prev = e;
  }
}

TEST(ErfInv, RoundTrip) {
  for (double y : {-0.9, -0.3, 0.0, 0.01, 0.5, 0.99}) EXPECT_NEAR(sgdlab::erf(erf_inv(y)), y, 1e-9);
  EXPECT_THROW(erf_inv(1.0), InvalidArgument);
}

TEST(BerryEsseen, ZeroA) {
  EXPECT_NEAR(berry_esseen_bound(1.0, 2, 0.0, 10000), std::sqrt(125000.0 * 2 / 10000), 1e-15);
}

TEST(BerryEsseen, VacuousAtCrossover) {
  EXPECT_NEAR(berry_esseen_bound(1.0, 1, 0.3, 125000), sgdlab::erf(0.3) + 1.0, 1e-15);
  const double b = berry_esseen_bound(1.0, 1, std::sqrt(50.0) / 4.0, 10000);
  EXPECT_NEAR(b, erf_series(std::sqrt(50.0) / 4.0) + std::sqrt(12.5), 1e-12);
  EXPECT_GT(b, 1.0);
}

TEST(BerryEsseen, Monotonicity) {
  EXPECT_LT(berry_esseen_bound(1, 1, 0.1, 10000), berry_esseen_bound(1, 1, 0.2, 10000));
  EXPECT_LT(berry_esseen_bound(1, 1, 0.1, 10000), berry_esseen_bound(1, 2, 0.1, 10000));
  EXPECT_GT(berry_esseen_bound(1, 1, 0.1, 10000), berry_esseen_bound(1, 1, 0.1, 20000));
}

TEST(BerryEsseen, Preconditions) {
  EXPECT_THROW(berry_esseen_bound(1, 0, 0.1, 100), InvalidArgument);
  EXPECT_THROW(berry_esseen_bound(1, 50, 0.1, 100), InvalidArgument);
  EXPECT_THROW(berry_esseen_bound(0, 1, 0.1, 100), InvalidArgument);
}

TEST(BerryEsseen, WeightedPopcountMatchesLoop) {
  for (std::uint64_t w : {0ULL, 1ULL, 0xFFFFFFFFFFFFFFFFULL, 0x8000000000000001ULL, 0x123456789ABCDEFULL}) {
    std::uint64_t s = 0;
    for (int j = 0; j < 64; ++j) s += ((w >> j) & 1U) ? j : 0;
    EXPECT_EQ(detail::weighted_popcount(w), s);
  }
}

TEST(BerryEsseen, SignedSumMatchesDirect) {
  const std::size_t T = 300, n = 150;
  Rng a(17), b(17);
  const auto fast = detail::signed_weighted_sum(a, n, T);
  std::int64_t direct = 0;
  for (std::size_t base = 0; base < n; base += 64) {
    const std::uint64_t word = b();
    for (std::size_t j = 0; j < 64 && base + j < n; ++j) {
      const auto t = static_cast<std::int64_t>(base + j + 1);
      direct += (((word >> j) & 1U) ? 1 : -1) * (static_cast<std::int64_t>(T) - t);
    }
  }
  EXPECT_EQ(fast, direct);
}

TEST(BerryEsseen, EmpiricalBelowBound) {
  const auto r = be_empirical_check(1.0, 1, std::sqrt(50.0) / 4.0, 10000, 100000, 3);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.empirical, r.analytic);
}

TEST(BerryEsseen, LargeAIsCertain) {
  const auto r = be_empirical_check(1.0, 1, 100.0, 10000, 2000, 3);
  EXPECT_EQ(r.empirical, 1.0);
  EXPECT_GT(r.analytic, 1.0);
  EXPECT_TRUE(r.pass);
}

TEST(BerryEsseen, SampleVarianceMatchesExact) {
  // Var(2 sum (T - t) x_t) = 4 sum (T - t)^2 / 2, so the c-scaled variance is var / (4 T^2) * c^2.
  for (std::size_t k : {1u, 2u}) {
    const std::size_t T = 2000;
    const auto sums = be_sample_sums(k, T, 40000, 11);
    double m2 = 0;
    for (auto s : sums) m2 += static_cast<double>(s) * static_cast<double>(s);
    m2 /= static_cast<double>(sums.size());
    const double est = m2 / (4.0 * T * T);
    const double exact = be_exact_variance(1.0, k, T);
    EXPECT_NEAR(est / exact, 1.0, 0.03) << "k=" << k;
    EXPECT_GE(exact, T / (50.0 * k));
  }
}

TEST(ExitTime, BoundAlgebra) {
  EXPECT_NEAR(hoeffding_exit_bound(32.0 * std::log(8.0), 1.0), 1.0, 1e-15);
}

TEST(ExitTime, FrozenWalkNeverExits) { EXPECT_EQ(count_walk_exits(0.0, 1000, 500, 1), 0u); }

TEST(ExitTime, EmpiricalBelowBound) {
  const auto r = exit_time_empirical(64.0, 1.0, 10000, 20000, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.empirical, 0.1);
}

TEST(Wilson, Extremes) {
  EXPECT_EQ(wilson_ci(0, 100).lo, 0.0);
  EXPECT_EQ(wilson_ci(1, 1).hi, 1.0);
}

TEST(Wilson, TextbookMidpoint) {
  const double z = 1.959963984540054, n = 100, p = 0.5;
  const double center = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  const Interval ci = wilson_ci(50, 100);
  EXPECT_NEAR(ci.lo, center - half, 1e-6);
  EXPECT_NEAR(ci.hi, center + half, 1e-6);
  EXPECT_NEAR(ci.lo, 0.404, 1e-3);
  EXPECT_NEAR(ci.hi, 0.596, 1e-3);
}

TEST(Wilson, Errors) { EXPECT_THROW(wilson_ci(3, 2), InvalidArgument); }
