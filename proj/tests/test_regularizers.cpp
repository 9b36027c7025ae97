#include <gtest/gtest.h>

#include <cmath>

#include "sgdlab/regularizers.hpp"

using namespace sgdlab;

namespace {
Vec2 grid_segment_min(const Regularizer& r, const Vec2& a, const Vec2& b, double step) {
  double best = INFINITY;
  Vec2 arg = a;
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    const Vec2 p = a + (static_cast<double>(i) / n) * (b - a);
    const double v = r(p);
    if (v < best) best = v, arg = p;
  }
  return arg;
}
}  // namespace

TEST(Probe, SquaredNormPasses) {
  const auto rep = probe_regularizer(sq_norm_regularizer());
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.grid_min, 1e-6);
}

TEST(Probe, OverstatedModulusFails) {
  Regularizer r = sq_norm_regularizer();
  r.lambda = 2.0;
  EXPECT_FALSE(probe_regularizer(r).strongly_convex);
}

TEST(Probe, ConstantIsRejected) {
  const Regularizer r("flat", [](const VecD&) { return 0.0; });
  EXPECT_FALSE(probe_regularizer(r).non_constant);
}

TEST(KMembership, Cases) {
  const Regularizer r = sq_norm_regularizer();
  const auto zero = [](const Vec2&) { return 0.0; };
  const Vec2 w{1, 0};
  EXPECT_TRUE(k_membership(w, w, zero, r));
  EXPECT_TRUE(k_membership(Vec2{0, 0}, w, zero, r));
  EXPECT_FALSE(k_membership(Vec2{2, 0}, w, zero, r));
}

TEST(SegmentMin, SquaredNorm) {
  const auto m = min_over_segment(sq_norm_regularizer(), {0, 1}, {0.024, 1}, 1e-10);
  EXPECT_NEAR(m.point.x, 0.0, 1e-9);
}

TEST(SegmentMin, ShiftedToRightEnd) {
  const auto m = min_over_segment(shifted_sq_norm_regularizer({0.024, 1}), {0, 1}, {0.024, 1}, 1e-10);
  EXPECT_NEAR(m.point.x, 0.024, 1e-7);
  EXPECT_EQ(m.value, 0.0);
}

TEST(SegmentMin, InteriorMatchesDenseGrid) {
  const Regularizer r = shifted_sq_norm_regularizer({0.012, 1});
  const auto m = min_over_segment(r, {0, 1}, {0.024, 1}, 1e-10);
  const Vec2 g = grid_segment_min(r, {0, 1}, {0.024, 1}, 1e-6 / 0.024);
  EXPECT_NEAR(m.point.x, g.x, 1e-6);
  EXPECT_NEAR(m.point.x, 0.012, 1e-8);
}

TEST(SegmentMin, NonConvexFallback) {
  const Regularizer r = l1_normalized_regularizer();
  const auto m = min_over_segment(r, {-0.5, 1}, {0.5, 1}, 1e-4);
  EXPECT_NEAR(m.point.x, 0.0, 1e-4);
}

TEST(MakeRegularizer, Names) {
  EXPECT_EQ(make_regularizer("sq-norm").name(), "sq-norm");
  EXPECT_NEAR(make_regularizer("shifted-sq-norm:0.3,0")(Vec2{0.3, 0}), 0.0, 1e-15);
  EXPECT_THROW(make_regularizer("nope"), ConfigError);
  EXPECT_THROW(make_regularizer("custom-grid"), ConfigError);
}

TEST(CustomGrid, InterpolatesTable) {
  const auto table = GridTable::tabulate([](const Vec2& p) { return p.x * p.x + p.y * p.y; }, 101, 101);
  const Regularizer r = custom_grid_regularizer(table);
  EXPECT_NEAR(r(Vec2{0.0, 0.0}), 0.0, 1e-12);
  EXPECT_NEAR(r(Vec2{1.0, 2.0}), 5.0, 0.01);
  EXPECT_THROW(GridTable::from_json(nlohmann::json{{"nx", 2}}), std::exception);
}

TEST(Warmup, SquaredNormTakesScaledBranch) {
  const auto c = build_warmup_construction(sq_norm_regularizer());
  EXPECT_EQ(c.case_id, 2);
  EXPECT_NEAR(c.w_star.x, 0.0, 1e-9);
  EXPECT_NEAR(c.w_star.y, 1.0, 1e-12);
}

TEST(Warmup, ShiftedNormTakesEuclideanBranch) {
  const auto c = build_warmup_construction(shifted_sq_norm_regularizer({0.024, 1}));
  EXPECT_EQ(c.case_id, 1);
  EXPECT_GE(norm(c.w_star - Vec2{0, 1}), 0.012);
  EXPECT_EQ(objective_value(c.objective, {0, 1}), 0.0);
  EXPECT_EQ(objective_value(c.objective, {0.024, 1}), 0.0);
}

TEST(Warmup, RequiresModulus) {
  EXPECT_THROW(build_warmup_construction(l1_normalized_regularizer()), ConfigError);
}

TEST(Warmup, EndToEndCertificate) {
  const auto res = run_warmup(sq_norm_regularizer(), 0.5, 100000);
  EXPECT_TRUE(res.certificate.valid);
  EXPECT_GE(res.certificate.F_gap, 0.0);
  EXPECT_GE(res.certificate.r_gap, 1e-5);
  EXPECT_GE(res.certificate.r_gap, res.construction.predicted_gap);
}

TEST(Certificate, SelfIsInvalid) {
  const Vec2 w{0.2, 0.3};
  const auto c = violation_certificate(w, [](const Vec2& p) { return p.x; }, sq_norm_regularizer(), w);
  EXPECT_EQ(c.F_gap, 0.0);
  EXPECT_EQ(c.r_gap, 0.0);
  EXPECT_FALSE(c.valid);
}

TEST(Fichs1, L1FindsPair) {
  const auto p = fichs1_search(l1_normalized_regularizer(), 1e-3);
  EXPECT_NE(l1_normalized_regularizer()(p.w1), l1_normalized_regularizer()(p.w2));
  EXPECT_NEAR(dot(p.w1, perp(p.w1)), 0.0, 1e-15);
  EXPECT_LT(std::abs(p.delta), 0.005 * norm(p.w1));
}

TEST(Fichs1, RadiallyConstantIsNotFound) {
  const Regularizer r("radial", [](const VecD& w) { return w.squared_norm() > 0 ? 1.0 : 0.0; });
  EXPECT_THROW(fichs1_search(r, 1e-2), NotFound);
}

TEST(Gdr, ConstructionVanishesAtPair) {
  const Regularizer r = l1_normalized_regularizer();
  const auto pair = fichs1_search(r, 1e-3);
  const auto g = build_gdr_construction(r, pair, 0.5);
  EXPECT_NEAR(objective_value(g.objective, pair.w1), 0.0, 1e-20);
  EXPECT_NEAR(objective_value(g.objective, pair.w2), 0.0, 1e-20);
  EXPECT_FALSE(g.capped);
}

TEST(Gdr, EndToEndCertificate) {
  const auto res = run_gdr(l1_normalized_regularizer(), 1e-3, 0.5);
  EXPECT_TRUE(res.certificate.valid);
  EXPECT_GT(res.certificate.r_gap, res.construction.c_r);
}
