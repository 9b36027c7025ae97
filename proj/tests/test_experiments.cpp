#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "sgdlab/experiments.hpp"

using namespace sgdlab;

TEST(Coupled, TwoStepsHaveNoGoodPositions) {
  const auto dist = ProductDistribution::paired(2, 1.0);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(draw_coupled(2, dist, s).good.empty());
}

TEST(Coupled, FlipIsInvolution) {
  const auto dist = ProductDistribution::paired(50, 1.0);
  const auto cs = draw_coupled(50, dist, 3);
  EXPECT_EQ(flip_at(cs.S_prime, cs.good), cs.S);
}

TEST(Coupled, LedgerRules) {
  const auto dist = ProductDistribution::averaged(30, 4, 1.0, 0.0, 2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto cs = draw_coupled(30, dist, seed);
    std::map<std::size_t, int> count;
    for (const auto& z : cs.S) {
      for (const auto& e : z.entries) ++count[e.first];
    }
    std::set<Position> good(cs.good.begin(), cs.good.end());
    for (std::size_t t = 1; t <= 30; ++t) {
      for (std::size_t l = 0; l < 4; ++l) {
        const auto& e = cs.S[t - 1].entries[l];
        const auto& ep = cs.S_prime[t - 1].entries[l];
        const bool is_good = 2 * t < 30 && count[e.first] == 1;
        EXPECT_EQ(good.count({t, l}) == 1, is_good);
        EXPECT_EQ(ep.first, e.first);
        EXPECT_EQ(ep.second, is_good ? -e.second : e.second);
      }
    }
  }
}

TEST(Coupled, MeanGoodCountAboveFifth) {
  const auto dist = ProductDistribution::paired(200, 1.0 / 3.0);
  std::vector<double> g;
  for (std::uint64_t s = 0; s < 1000; ++s) g.push_back(static_cast<double>(draw_coupled(200, dist, s).good.size()));
  const auto m = mean_ci(g);
  EXPECT_GE(m.mean - m.half_width, 40.0 * 0.9);
}

TEST(Coupled, MarginalsAgree) {
  const std::size_t T = 20;
  const auto dist = ProductDistribution::paired(T, 1.0);
  std::vector<double> plus_s(dist.num_pairs() + 1), plus_p(dist.num_pairs() + 1), n(dist.num_pairs() + 1);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto cs = draw_coupled(T, dist, derive_seed(42, s));
    for (std::size_t t = 0; t < T; ++t) {
      const auto [i, z] = cs.S[t].entries[0];
      n[i] += 1;
      plus_s[i] += z > 0;
      plus_p[i] += cs.S_prime[t].entries[0].second > 0;
    }
  }
  for (std::size_t i = 1; i <= dist.num_pairs(); ++i) {
    const double ps = plus_s[i] / n[i], pp = plus_p[i] / n[i];
    const double se = std::sqrt(0.25 / n[i]) * std::sqrt(2.0);
    EXPECT_LT(std::abs(ps - pp), 3 * se) << i;
  }
}

TEST(PairIdentity, PairedProduct) {
  const std::size_t T = 60;
  const double eta = 3.0 / std::sqrt(T);
  const auto dist = ProductDistribution::paired(T, 1.0 / 3.0);
  const auto cs = draw_coupled(T, dist, 8);
  ASSERT_FALSE(cs.good.empty());
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.radius = 1.0;
  auto tr = run_sgd_on_sample(dist, cs.S, cfg);
  EXPECT_TRUE(averaged_pair_identity_check(tr, cs, dist));
  EXPECT_TRUE(averaged_pair_identity_check(run_sgd_on_sample(dist, cs.S_prime, cfg), cs, dist, true));
  std::set<std::size_t> touched;
  for (const auto& z : cs.S) touched.insert(z.entries[0].first);
  for (std::size_t i = 1; i <= dist.num_pairs(); ++i) {
    if (!touched.count(i)) {
      EXPECT_EQ(tr.output.pair(i), (Vec2{0, 0}));
    }
  }
  const auto [t, l] = cs.good.front();
  const auto idx = cs.S[t - 1].entries[l].first;
  tr.output.set_pair(idx, tr.output.pair(idx) + Vec2{1e-9, 0});
  EXPECT_FALSE(averaged_pair_identity_check(tr, cs, dist));
}

TEST(PairIdentity, PlusOneValue) {
  const std::size_t T = 40;
  const double eta = 0.05;
  const auto dist = ProductDistribution::paired(T, 1.0);
  const auto cs = draw_coupled(T, dist, 2);
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.radius = 1.0;
  const auto tr = run_sgd_on_sample(dist, cs.S, cfg);
  for (const auto& [t, l] : cs.good) {
    const auto [i, z] = cs.S[t - 1].entries[l];
    if (z != 1) continue;
    const double f = (T - static_cast<double>(t)) / T * eta;
    EXPECT_NEAR(tr.output.pair(i).x, -f * 0.25, 1e-12);
    EXPECT_NEAR(tr.output.pair(i).y, -f * 0.75, 1e-12);
  }
}

TEST(PairIdentity, AveragedProduct) {
  const std::size_t T = 12, k = 5;
  const double eta = 3.0 / std::sqrt(T);
  const auto dist = ProductDistribution::averaged(T, k, 1.0 / 3.0, 0.0, 1000);
  const auto cs = draw_coupled(T, dist, 4);
  ASSERT_FALSE(cs.good.empty());
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.radius = 1.0;
  EXPECT_TRUE(averaged_pair_identity_check(run_sgd_on_sample(dist, cs.S, cfg), cs, dist));
}

TEST(Sgdr, SmallRunAndDeterminism) {
  SgdrParams p;
  p.trials = 100;
  p.seed = 7;
  const auto a = experiment_sgdr(p), b = experiment_sgdr(p);
  EXPECT_TRUE(a.all_a);
  EXPECT_TRUE(a.all_b);
  EXPECT_TRUE(a.all_identity);
  EXPECT_EQ(a.projection_trials, 0u);
  EXPECT_EQ(a.valid_certificates, 100u);
  EXPECT_EQ(a.to_json(true).dump(), b.to_json(true).dump());
}

TEST(Sgdr, RegimeGate) {
  SgdrParams p;
  p.eta = 3.0 / std::sqrt(200.0) * 1.01;
  EXPECT_THROW(experiment_sgdr(p), ConfigError);
  p.eta = 0.0;
  p.C = 2.0;
  EXPECT_THROW(experiment_sgdr(p), ConfigError);
  p.C = 3.0;
  p.eta = 1e-5;
  EXPECT_THROW(experiment_sgdr(p), ConfigError);
}

TEST(FeldmanProbe, NoSamplesIsCertain) {
  const auto r = feldman_complexity_probe(full_cube(8), 8, 0, 50, 1);
  EXPECT_EQ(r.probability, 1.0);
  EXPECT_EQ(r.exact_probability, 1.0);
}

TEST(FeldmanProbe, SingletonMatchesShellProbability) {
  for (std::size_t m : {1u, 2u, 3u}) {
    const auto r = feldman_complexity_probe({0x2B5}, 12, m, 20000, 9);
    EXPECT_DOUBLE_EQ(r.exact_probability, std::ldexp(1.0, -static_cast<int>(m)));
    EXPECT_LE(std::abs(r.probability - r.exact_probability), 3 * r.ci.half_width()) << m;
  }
}

TEST(FeldmanProbe, FullCube) {
  const auto r = feldman_complexity_probe(full_cube(12), 12, 2, 2000, 1);
  EXPECT_GE(r.probability, 0.5);
  EXPECT_NEAR(r.probability, r.exact_probability, 0.01);
  EXPECT_EQ(r.epsilon, 0.25);
}

TEST(FeldmanProbe, Limits) {
  EXPECT_THROW(feldman_complexity_probe({1}, 25, 1, 10, 1), Unsupported);
  EXPECT_THROW(feldman_complexity_probe({}, 10, 1, 10, 1), InvalidArgument);
}

TEST(Nouc, DeskScale) {
  NoucParams p;
  p.k = 8;
  p.probe_trials = 500;
  const auto r = experiment_nouc(p);
  ASSERT_FALSE(r.skipped);
  EXPECT_TRUE(r.losses_equal);
  EXPECT_TRUE(r.images_on_cube);
  EXPECT_TRUE(r.lipschitz_ok);
  EXPECT_LE(r.worst_ratio, r.g);
  EXPECT_TRUE(r.probe_ran);
  EXPECT_TRUE(r.probe_ok);
}

TEST(Nouc, SkipsTinyLedger) {
  NoucParams p;
  p.T = 4;
  p.k = 1;
  p.dim_factor = 10;
  const auto r = experiment_nouc(p);
  EXPECT_TRUE(r.skipped);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Nonconvex, Beta) {
  const double b = solve_beta(1.0);
  const double e = sgdlab::erf(std::sqrt(50.0) / 4.0);
  EXPECT_NEAR(sgdlab::erf(b), std::sqrt(e) - e, 1e-9);
  EXPECT_NEAR(b, 0.0055, 1e-4);
  EXPECT_THROW(solve_beta(0.01), ConfigError);
}

TEST(Nonconvex, FastPathMatchesGenericSgd) {
  const SquareWalkDistribution dist;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RunConfig cfg;
    cfg.T = 5000;
    cfg.eta = 1.0 / std::sqrt(5000.0);
    cfg.radius = INFINITY;
    cfg.seed = seed;
    cfg.store_iterates = false;
    EXPECT_EQ(run_sgd(dist, cfg).output, run_square_walk(cfg.T, cfg.eta, seed).output);
  }
}

TEST(Nonconvex, SmallRun) {
  NonconvexParams p;
  p.T = 2000;
  p.trials = 3000;
  const auto r = experiment_nonconvex(p, shifted_sq_norm_regularizer({0.3, 0}));
  EXPECT_GT(r.e, 0u);
  EXPECT_EQ(r.equality_failures, 0u);
  EXPECT_EQ(r.distance_failures, 0u);
  EXPECT_EQ(r.midpoint_failures, 0u);
  EXPECT_TRUE(r.not_e1_bound.pass);
  EXPECT_THROW(experiment_nonconvex(p, l1_normalized_regularizer()), ConfigError);
}
