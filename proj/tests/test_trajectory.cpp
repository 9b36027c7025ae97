#include <gtest/gtest.h>

#include <cmath>

#include "sgdlab/trajectory.hpp"

using namespace sgdlab;

TEST(DetectPhases, BoundsAtStepPointTwo) {
  const auto ph = detect_phases(0.02, 1.0, 0.2);
  EXPECT_GE(ph.t0, 3u);
  EXPECT_LE(ph.t0, 15u);
  ASSERT_TRUE(ph.has_t1());
  EXPECT_LE(ph.t1 - ph.t0, 35u);
  EXPECT_GE(ph.w_t0.x, 0.03125);
}

TEST(DetectPhases, RegimeErrors) {
  EXPECT_THROW(detect_phases(0.02, 1.0, 0.4), ConfigError);
  EXPECT_THROW(detect_phases(0.02, 1.2, 0.1), ConfigError);
  EXPECT_THROW(detect_phases(-0.01, 1.0, 0.1), ConfigError);
}

TEST(ClosedForm, FirstSteps) {
  const double eta = 0.1, th2 = 0.7;
  const auto ph = detect_phases(0.01, th2, eta);
  EXPECT_EQ(closed_form_iterate(1, ph), (Vec2{0, 0}));
  const Vec2 w2 = closed_form_iterate(2, ph);
  EXPECT_NEAR(w2.x, eta * th2 / 2, 1e-15);
  EXPECT_NEAR(w2.y, eta * th2, 1e-15);
  EXPECT_THROW(closed_form_iterate(0, ph), InvalidArgument);
  EXPECT_THROW(closed_form_iterate(3, 0.02, th2, eta, ph), InvalidArgument);
}

TEST(ClosedForm, ConvergesToRightEnd) {
  const auto ph = detect_phases(0.02, 1.0, 0.2);
  const Vec2 w = closed_form_iterate(5000, ph);
  EXPECT_NEAR(w.x, 0.02, 1e-12);
  EXPECT_NEAR(w.y, 1.0, 1e-12);
}

TEST(ClosedForm, MatchesSimulationOnGrid) {
  for (double eta : {0.01, 0.3}) {
    for (double th2 : {0.5, 1.0}) {
      const auto rep = verify_bounds(0.02 * th2, th2, eta, 2000);
      EXPECT_LE(rep.max_sim_oracle_gap, 1e-9) << eta << " " << th2;
    }
  }
}

TEST(VerifyBounds, RawScale) {
  const auto rep = verify_bounds(0.02, 1.0, 0.1, 10000);
  EXPECT_TRUE(rep.all_ok());
  EXPECT_NEAR(rep.raw_bound, 0.12, 1e-15);
  EXPECT_LE(rep.raw_distance, 0.12);
  EXPECT_EQ(rep.projection_events, 0u);
}

TEST(VerifyBounds, ScaledObjective) {
  const auto rep = verify_scaled_bound(0.02, 1.0, 0.5, 100000);
  EXPECT_TRUE(rep.ok);
  EXPECT_LE(rep.distance, 2640.0 / (0.5 * 1e5));
}

TEST(VerifyBounds, DegenerateSegment) {
  RunConfig cfg;
  cfg.eta = 0.2;
  cfg.T = 20000;
  const auto tr = run_gd(SegmentQuadratic(0.0, 1.0), cfg);
  EXPECT_NEAR(tr.final_iterate.x, 0.0, 1e-12);
  EXPECT_NEAR(tr.final_iterate.y, 1.0, 1e-12);
}
