#include <gtest/gtest.h>

#include <cmath>

#include "sgdlab/geometry.hpp"
#include "sgdlab/rng.hpp"

using namespace sgdlab;

TEST(Metric2, CanonicalEigenvalues) {
  const auto ev = Metric2::canonical().eigenvalues();
  EXPECT_NEAR(ev.first, 0.5, 1e-15);
  EXPECT_NEAR(ev.second, 1.5, 1e-15);
}

TEST(Metric2, RejectsIndefinite) {
  EXPECT_THROW(Metric2(1.0, 2.0, 1.0), InvalidArgument);
  EXPECT_THROW(Metric2(-1.0, 0.0, 1.0), InvalidArgument);
}

TEST(ProjectBall, InsideIsIdentity) {
  const Vec2 w = project_ball(Vec2{3, 4}, 5.0);
  EXPECT_EQ(w, (Vec2{3, 4}));
}

TEST(ProjectBall, RadialScaling) {
  const Vec2 w = project_ball(Vec2{6, 8}, 5.0);
  EXPECT_NEAR(w.x, 3.0, 1e-15);
  EXPECT_NEAR(w.y, 4.0, 1e-15);
}

TEST(ProjectBall, OriginFixed) { EXPECT_EQ(project_ball(Vec2{0, 0}, 1.0), (Vec2{0, 0})); }

TEST(ProjectBall, Errors) {
  EXPECT_THROW(project_ball(Vec2{NAN, 0}, 1.0), InvalidArgument);
  EXPECT_THROW(project_ball(Vec2{1, 0}, 0.0), InvalidArgument);
  EXPECT_THROW(project_ball(Vec2{1, 0}, -2.0), InvalidArgument);
}

TEST(ProjectBall, SparseMatchesDense) {
  VecD s = VecD::zeros(200, true);
  s.set_pair(7, {30, 40});
  VecD d = s.to_dense();
  const VecD ps = project_ball(s, 5.0);
  const VecD pd = project_ball(d, 5.0);
  EXPECT_TRUE(canonical_equal(ps, pd, 1e-15));
  EXPECT_NEAR(ps.pair(7).x, 3.0, 1e-14);
}

namespace {
/// Grid minimization of the metric distance over alpha in [0, theta1] at step 1e-5.
Vec2 grid_projection(const Vec2& w, double theta1, double theta2, const Metric2& m) {
  double best = INFINITY, best_a = 0;
  const auto n = static_cast<long>(std::llround(theta1 / 1e-5));
  for (long i = 0; i <= n; ++i) {
    const double a = std::min(theta1, i * 1e-5);
    const double q = m.quadratic(w - Vec2{a, theta2});
    if (q < best) best = q, best_a = a;
  }
  return {best_a, theta2};
}
}  // namespace

TEST(ProjectSegmentMetric, OriginGoesToLeftEnd) {
  EXPECT_EQ(project_segment_metric({0, 0}, 0.25, 1.0, Metric2::canonical()), (Vec2{0, 1}));
}

TEST(ProjectSegmentMetric, MatchesGridOracle) {
  for (Vec2 w : {Vec2{0.5, 1}, Vec2{0.1, 1}, Vec2{0.3, 0.2}, Vec2{-0.4, 1.6}, Vec2{0.05, 0.9}}) {
    const Vec2 p = project_segment_metric(w, 0.25, 1.0, Metric2::canonical());
    const Vec2 g = grid_projection(w, 0.25, 1.0, Metric2::canonical());
    EXPECT_NEAR(p.x, g.x, 1e-5) << to_string(w);
    EXPECT_EQ(p.y, 1.0);
  }
  EXPECT_NEAR(project_segment_metric({0.5, 1}, 0.25, 1.0, Metric2::canonical()).x, 0.25, 0);
  EXPECT_NEAR(project_segment_metric({0.1, 1}, 0.25, 1.0, Metric2::canonical()).x, 0.1, 1e-15);
}

TEST(ProjectSegmentMetric, DegenerateSegmentIsPoint) {
  EXPECT_EQ(project_segment_metric({0.7, -0.3}, 0.0, 1.0, Metric2::canonical()), (Vec2{0, 1}));
}

TEST(PairView, Indexing) {
  const VecD w = VecD::from(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(pair_view(w, 2), (Vec2{3, 4}));
}

TEST(PairView, ReadAfterWrite) {
  VecD w = VecD::zeros(4);
  w = pair_write(w, 1, {5, 6});
  EXPECT_EQ(pair_view(w, 1), (Vec2{5, 6}));
}

TEST(PairView, SparseAbsentIsZero) {
  const VecD w = VecD::zeros(2000000, true);
  EXPECT_EQ(pair_view(w, 100000), (Vec2{0, 0}));
}

TEST(PairView, OutOfRange) {
  VecD w = VecD::zeros(4);
  EXPECT_THROW(pair_view(w, 3), InvalidArgument);
  EXPECT_THROW(pair_view(w, 0), InvalidArgument);
}

TEST(VecD, SparseDenseCanonicalEquality) {
  Rng rng(5);
  VecD s = VecD::zeros(500, true);
  for (int i = 0; i < 40; ++i) {
    const auto p = 1 + uniform_below(rng, 250);
    s.set_pair(p, {uniform01(rng) - 0.5, uniform01(rng) - 0.5});
  }
  const VecD d = s.to_dense();
  EXPECT_TRUE(canonical_equal(s, d));
  EXPECT_TRUE(canonical_equal(d.to_sparse(), s));
  EXPECT_DOUBLE_EQ(s.squared_norm(), d.squared_norm());
}

TEST(VecD, SparseAxpyMatchesDense) {
  Rng rng(9);
  VecD a = VecD::zeros(300, true), b = VecD::zeros(300, true);
  for (int i = 0; i < 30; ++i) {
    a.set_pair(1 + uniform_below(rng, 150), {uniform01(rng), -uniform01(rng)});
    b.set_pair(1 + uniform_below(rng, 150), {-uniform01(rng), uniform01(rng)});
  }
  VecD ad = a.to_dense();
  a.axpy(-0.7, b);
  ad.axpy(-0.7, b.to_dense());
  EXPECT_TRUE(canonical_equal(a, ad, 1e-15));
}

TEST(VecD, RejectsNonFinite) {
  VecD w = VecD::zeros(4);
  EXPECT_THROW(w.set_pair(1, {INFINITY, 0}), InvalidArgument);
}
