#include <gtest/gtest.h>

#include <cmath>

#include "sgdlab/objectives.hpp"

using namespace sgdlab;

namespace {
template <class F>
Vec2 central_diff(F&& f, const Vec2& w, double h = 1e-6) {
  return {(f(w + Vec2{h, 0}) - f(w - Vec2{h, 0})) / (2 * h), (f(w + Vec2{0, h}) - f(w - Vec2{0, h})) / (2 * h)};
}
}  // namespace

TEST(SegmentQuadratic, ZeroOnSegment) {
  const SegmentQuadratic f(0.25, 1.0);
  EXPECT_EQ(f.value({0, 1}), 0.0);
  EXPECT_EQ(f.value({0.25, 1}), 0.0);
  EXPECT_EQ(f.value({0.1, 1}), 0.0);
  EXPECT_GT(f.value({0.3, 1}), 0.0);
}

TEST(SegmentQuadratic, GradientAtOrigin) {
  const SegmentQuadratic f(0.25, 1.0);
  const Vec2 g = f.grad({0, 0});
  EXPECT_NEAR(norm(g), std::sqrt(5.0) / 2.0, 1e-15);
  EXPECT_NEAR(g.x, -0.5, 1e-15);
  EXPECT_NEAR(g.y, -1.0, 1e-15);
}

TEST(SegmentQuadratic, GradientMatchesFiniteDifferences) {
  const SegmentQuadratic f(0.25, 1.0);
  const Vec2 g = f.grad({0.1, 0.5});
  const Vec2 fd = central_diff([&](const Vec2& w) { return f.value(w); }, {0.1, 0.5});
  EXPECT_NEAR(g.x, -0.15, 1e-15);
  EXPECT_NEAR(g.y, -0.45, 1e-15);
  EXPECT_NEAR(g.x, fd.x, 1e-8);
  EXPECT_NEAR(g.y, fd.y, 1e-8);
}

TEST(SegmentQuadratic, Preconditions) {
  EXPECT_THROW(SegmentQuadratic(-0.1, 1.0), InvalidArgument);
  EXPECT_THROW(SegmentQuadratic(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(SegmentQuadratic(0.1, 1.5), InvalidArgument);
  EXPECT_TRUE(SegmentQuadratic(0.024, 1.0).thin());
  EXPECT_FALSE(SegmentQuadratic(0.03, 1.0).thin());
}

TEST(EuclideanSegment, ZeroAtEndpoints) {
  const EuclideanSegment f({0, 1}, {0.024, 1});
  EXPECT_EQ(f.value({0, 1}), 0.0);
  EXPECT_EQ(f.value({0.024, 1}), 0.0);
  const Vec2 w{0.3, -0.2};
  const Vec2 fd = central_diff([&](const Vec2& p) { return f.value(p); }, w);
  EXPECT_NEAR(f.grad(w).x, fd.x, 1e-10);
  EXPECT_NEAR(f.grad(w).y, fd.y, 1e-10);
}

TEST(OrthogonalTransformed, RotationPreservesNorm) {
  Rng rng(2);
  const Orthogonal2 q = Orthogonal2::rotate_onto_e2({0.3, 0.4});
  const Vec2 e = q.apply({0.3, 0.4});
  EXPECT_NEAR(e.x, 0.0, 1e-15);
  EXPECT_NEAR(e.y, 0.5, 1e-15);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 w{uniform01(rng) * 4 - 2, uniform01(rng) * 4 - 2};
    EXPECT_NEAR(norm(q.apply(w)), norm(w), 1e-14);
    EXPECT_NEAR(norm(q.reflect_first().apply(w)), norm(w), 1e-14);
  }
}

TEST(OrthogonalTransformed, GradientIsPulledBack) {
  const Orthogonal2 q = Orthogonal2::rotate_onto_e2({0.6, 0.2});
  const OrthogonalTransformed<SegmentQuadratic> f(SegmentQuadratic(0.01, 0.7), q);
  const Vec2 w{0.2, -0.4};
  const Vec2 fd = central_diff([&](const Vec2& p) { return f.value(p); }, w);
  EXPECT_NEAR(f.grad(w).x, fd.x, 1e-9);
  EXPECT_NEAR(f.grad(w).y, fd.y, 1e-9);
}

TEST(HingePair, GradientAtOrigin) {
  const HingePair hp(0.01, 1.0);
  const Vec2 g = hp.grad({0, 0}, 1);
  EXPECT_EQ(g, (Vec2{0.25, 0.75}));
  EXPECT_EQ(g, -1.0 * HingePair::anchor(1));
}

TEST(HingePair, AnchorsAreQuarterApart) {
  EXPECT_NEAR(norm(HingePair::anchor(1) - HingePair::anchor(-1)), 0.25, 1e-15);
}

TEST(HingePair, FrozenPointsAreFlat) {
  const double c = 0.01;
  const HingePair hp(c, 1.0);
  for (double eta : {2 * c + 1e-6, 0.1, 0.9}) {
    for (int z : {1, -1}) {
      EXPECT_NEAR(hp.value(hp.frozen_point(1, eta), z), hp.value(hp.frozen_point(-1, eta), z), 1e-12);
      EXPECT_EQ(hp.value(hp.frozen_point(z, eta), z), 0.0);
    }
  }
}

TEST(HingePair, Labels) {
  const HingePair hp(0.01, 1.0);
  EXPECT_THROW(hp.value({0, 0}, 0), InvalidArgument);
  EXPECT_THROW(HingePair(0.0, 1.0), InvalidArgument);
}

TEST(ProductDistribution, PairedGradientAtZero) {
  const ProductDistribution dist(10, 1, HingePair(0.01, 1.0));
  const ProductInstance z{{{3, 1}}};
  const VecD g = dist.grad(z, dist.zero());
  for (std::size_t i = 1; i <= 5; ++i) {
    EXPECT_EQ(g.pair(i), (i == 3 ? Vec2{0.25, 0.75} : Vec2{})) << i;
  }
  // dense oracle: evaluate the defining sum directly
  std::vector<double> dense(10, 0.0);
  const auto fd = [&](std::size_t coord, double h) {
    std::vector<double> p = dense;
    p[coord] += h;
    return dist.value(z, VecD::from(p));
  };
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_NEAR((fd(j, 1e-7) - fd(j, -1e-7)) / 2e-7, g.get(j), 1e-7) << j;
  }
}

TEST(ProductDistribution, AveragedValueAtZero) {
  const double rho = 0.5, c = 0.02;
  const ProductDistribution dist(20, 2, HingePair(c, rho));
  const ProductInstance z{{{2, 1}, {7, -1}}};
  const double expected =
      rho * c * (squared_norm(HingePair::anchor(1)) + squared_norm(HingePair::anchor(-1))) / 2.0;
  EXPECT_NEAR(dist.value(z, dist.zero()), expected, 1e-16);
}

TEST(ProductDistribution, ValueNonnegative) {
  const auto dist = ProductDistribution::averaged(8, 3, 0.3, 0.0, 10);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto z = dist.sample(rng);
    VecD w = VecD::zeros(dist.dim());
    for (std::size_t j = 0; j < dist.dim(); ++j) w.set(j, uniform01(rng) * 2 - 1);
    EXPECT_GE(dist.value(z, w), 0.0);
  }
}

TEST(ProductDistribution, InstanceValidation) {
  const ProductDistribution dist(20, 2, HingePair(0.02, 1.0));
  EXPECT_THROW(dist.validate({{{2, 1}}}), InvalidInstance);
  EXPECT_THROW(dist.validate({{{2, 1}, {2, -1}}}), InvalidInstance);
  EXPECT_THROW(dist.validate({{{2, 1}, {11, -1}}}), InvalidInstance);
  EXPECT_THROW(dist.validate({{{2, 0}, {3, -1}}}), InvalidInstance);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_NO_THROW(dist.validate(dist.sample(rng)));
}

TEST(ProductDistribution, JsonRoundTrip) {
  const ProductInstance z{{{5, 1}, {9, -1}}};
  EXPECT_EQ(product_instance_from_json(instance_to_json(z)), z);
}

TEST(SquareWalk, Branches) {
  const SquareWalkDistribution d;
  EXPECT_EQ(d.value(1, {0, 0}), 0.0);
  EXPECT_EQ(d.grad(1, {0, 0}), (Vec2{1, 0}));
  EXPECT_EQ(d.value(1, {0.5, 0}), 0.0);
  EXPECT_EQ(d.grad(1, {0.5, 0}), (Vec2{0, 0}));
  EXPECT_THROW(d.value(5, {0, 0}), InvalidArgument);
}

TEST(SquareWalk, MeanGradientVanishes) {
  const SquareWalkDistribution d;
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Vec2 w{uniform01(rng) - 0.5, uniform01(rng) - 0.5};
    Vec2 s{};
    for (int z = 1; z <= 4; ++z) s += d.grad(z, w);
    EXPECT_EQ(s, (Vec2{0, 0}));
    EXPECT_EQ(d.population_value(w), 0.0);
  }
}

TEST(Feldman, SupportIsSeparated) {
  const auto dist = FeldmanHardDistribution::over_cube(12);
  const auto& s = dist.support();
  ASSERT_GT(s.size(), 100u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) EXPECT_LE(cube_inner(s[i], s[j], 12), 0.5);
  }
}

TEST(Feldman, PopulationExcessIsQuarterOnSupport) {
  const auto dist = FeldmanHardDistribution::over_cube(12);
  for (CubePoint w = 0; w < 4096; ++w) EXPECT_GE(dist.population_excess(w), 0.0);
  for (CubePoint v : dist.support()) EXPECT_DOUBLE_EQ(dist.population_excess(v), 0.25);
}

TEST(Feldman, ExactExcessMatchesMonteCarlo) {
  const auto dist = FeldmanHardDistribution::over_cube(12);
  for (CubePoint w : {CubePoint{0}, CubePoint{0x5A5}, CubePoint{0xFFF}}) {
    const double exact = dist.population_excess(w);
    const double mc = dist.population_excess_mc(w, 200000, 8);
    EXPECT_NEAR(mc, exact, 0.004) << w;
  }
}

TEST(Feldman, EmpiricalExcessZeroWithoutNearMembers) {
  const auto dist = FeldmanHardDistribution::over_cube(12);
  const CubePoint w = dist.support()[3];
  FeldmanInstance inst;
  inst.included.assign((dist.support().size() + 63) / 64, ~std::uint64_t{0});
  inst.included[0] &= ~(std::uint64_t{1} << 3);
  EXPECT_EQ(dist.empirical_excess({inst, inst}, w), 0.0);
  EXPECT_GT(dist.value(inst, dist.support()[4]), 0.0);
}

TEST(Feldman, SeedDeterminism) {
  const auto dist = FeldmanHardDistribution::over_cube(10);
  Rng a(77), b(77);
  EXPECT_EQ(dist.sample(a), dist.sample(b));
}

TEST(Feldman, RealValueMatchesCubeValue) {
  const auto dist = FeldmanHardDistribution::over_cube(10).with_mask(0x155);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto inst = dist.sample(rng);
    const CubePoint w = uniform_below(rng, 1024);
    EXPECT_NEAR(dist.value(inst, w), dist.value(inst, cube_coords(w, 10)), 1e-12);
  }
}

TEST(Feldman, JsonRoundTrip) {
  const auto dist = FeldmanHardDistribution::over_cube(10);
  Rng rng(5);
  const auto inst = dist.sample(rng);
  EXPECT_EQ(feldman_instance_from_json(instance_to_json(inst, dist), dist), inst);
}

TEST(Feldman, ExactModeLimit) {
  const FeldmanHardDistribution dist(30, {0});
  EXPECT_THROW(dist.population_excess(0), Unsupported);
  EXPECT_THROW(FeldmanHardDistribution::over_cube(21), Unsupported);
}
