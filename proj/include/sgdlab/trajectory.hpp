#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/optimizers.hpp"

namespace sgdlab {

/// Phase boundaries of GD on the canonical segment objective, started at the origin.
struct PhaseTimes {
  static constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

  double theta1 = 0.0;
  double theta2 = 0.0;
  double eta = 0.0;
  std::size_t t0 = kNever;
  std::size_t t1 = kNever;
  Vec2 xi0{};
  Vec2 xi1{};
  Vec2 w_t0{};
  Vec2 w_t1{};

  bool has_t1() const { return t1 != kNever; }
};

namespace detail {

/// (I - eta Sigma)^n for the canonical Sigma, applied to v.
inline Vec2 step_matrix_power(double eta, std::size_t n, const Vec2& v) {
  const double nn = static_cast<double>(n);
  const double a = std::pow(1.0 - 1.5 * eta, nn);
  const double b = std::pow(1.0 - 0.5 * eta, nn);
  return {0.5 * ((a + b) * v.x + (a - b) * v.y), 0.5 * ((a - b) * v.x + (a + b) * v.y)};
}

inline Vec2 phase1_iterate(std::size_t t, double theta2, double eta) {
  const Vec2 xi0{0.0, theta2};
  return xi0 - step_matrix_power(eta, t - 1, xi0);
}

inline Vec2 phase2_iterate(std::size_t t, const PhaseTimes& ph) {
  const double f = std::pow(1.0 - 0.75 * ph.eta, static_cast<double>(t - ph.t0));
  return {ph.w_t0.x, f * (ph.w_t0.y - ph.theta2) + ph.theta2};
}

inline Vec2 phase3_iterate(std::size_t t, const PhaseTimes& ph) {
  return ph.xi1 + step_matrix_power(ph.eta, t - ph.t1, ph.w_t1 - ph.xi1);
}

inline void check_regime(double theta1, double theta2, double eta) {
  if (!(eta > 0.0 && eta < 1.0 / 3.0)) {
    throw ConfigError("trajectory: step size must lie in (0, 1/3) for the closed form");
  }
  if (!(theta2 > 0.0 && theta2 <= 1.0)) throw ConfigError("trajectory: theta2 must lie in (0, 1]");
  if (!(theta1 >= 0.0) || !std::isfinite(theta1)) throw ConfigError("trajectory: theta1 must be >= 0");
}

}  // namespace detail

/// t0 = first t with w1 + w2/2 >= theta2/2; t1 = first t >= t0 with w1 + w2/2 >= theta2/2 + theta1.
inline PhaseTimes detect_phases(double theta1, double theta2, double eta, std::size_t horizon = 1000000) {
  detail::check_regime(theta1, theta2, eta);
  PhaseTimes ph;
  ph.theta1 = theta1;
  ph.theta2 = theta2;
  ph.eta = eta;
  ph.xi0 = {0.0, theta2};
  ph.xi1 = {theta1, theta2};
  const auto lhs = [](const Vec2& w) { return w.x + 0.5 * w.y; };

  for (std::size_t t = 1; t <= horizon; ++t) {
    const Vec2 w = detail::phase1_iterate(t, theta2, eta);
    if (lhs(w) >= 0.5 * theta2) {
      ph.t0 = t;
      ph.w_t0 = w;
      break;
    }
  }
  if (ph.t0 == PhaseTimes::kNever) throw NumericalError("detect_phases: t0 not reached within horizon");

  for (std::size_t t = ph.t0; t <= horizon; ++t) {
    const Vec2 w = t == ph.t0 ? ph.w_t0 : detail::phase2_iterate(t, ph);
    if (lhs(w) >= 0.5 * theta2 + theta1) {
      ph.t1 = t;
      ph.w_t1 = w;
      break;
    }
  }
  return ph;
}

inline Vec2 closed_form_iterate(std::size_t t, const PhaseTimes& ph) {
  if (t < 1) throw InvalidArgument("closed_form_iterate: t must be >= 1");
  if (t <= ph.t0) return detail::phase1_iterate(t, ph.theta2, ph.eta);
  if (!ph.has_t1() || t <= ph.t1) return detail::phase2_iterate(t, ph);
  return detail::phase3_iterate(t, ph);
}

inline Vec2 closed_form_iterate(std::size_t t, double theta1, double theta2, double eta,
                                const PhaseTimes& ph) {
  if (ph.theta1 != theta1 || ph.theta2 != theta2 || ph.eta != eta) {
    throw InvalidArgument("closed_form_iterate: phase times belong to different parameters");
  }
  return closed_form_iterate(t, ph);
}

struct TrajectoryBoundReport {
  double theta1 = 0.0, theta2 = 0.0, eta = 0.0;
  std::size_t T = 0;
  PhaseTimes phases;
  double max_sim_oracle_gap = 0.0;
  bool t0_in_range = false;         // ceil(1/(2 eta)) <= t0 <= floor(3/eta)
  bool t1_gap_ok = false;           // t1 - t0 <= 7/eta
  bool w1_t0_ok = false;            // w1(t0) >= 0.03 theta2
  double w1_t0_ratio = 0.0;         // w1(t0) / theta2
  bool frozen_first_coordinate = false;
  bool condition2_persists = false;
  double raw_distance = 0.0;        // ||w_F - xi1||, unit scale, step eta
  double raw_bound = 0.0;           // 120 / (eta T)
  bool raw_ok = false;
  std::size_t projection_events = 0;

  bool all_ok() const {
    return t0_in_range && t1_gap_ok && w1_t0_ok && frozen_first_coordinate && condition2_persists &&
           raw_ok && max_sim_oracle_gap <= 1e-9;
  }
};

/// Simulates GD against the closed form and checks the phase and averaged-iterate bounds.
inline TrajectoryBoundReport verify_bounds(double theta1, double theta2, double eta, std::size_t T) {
  TrajectoryBoundReport rep;
  rep.theta1 = theta1;
  rep.theta2 = theta2;
  rep.eta = eta;
  rep.T = T;
  rep.phases = detect_phases(theta1, theta2, eta);
  const PhaseTimes& ph = rep.phases;

  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.radius = 5.0;
  const auto tr = run_gd(SegmentQuadratic(theta1, theta2), cfg);
  rep.projection_events = tr.projection_events;

  rep.frozen_first_coordinate = true;
  rep.condition2_persists = true;
  for (std::size_t t = 1; t <= T; ++t) {
    const Vec2& w = tr.iterates[t - 1];
    rep.max_sim_oracle_gap = std::max(rep.max_sim_oracle_gap, norm(w - closed_form_iterate(t, ph)));
    if (t >= ph.t0 && (!ph.has_t1() || t <= ph.t1) && std::abs(w.x - ph.w_t0.x) > 1e-12) {
      rep.frozen_first_coordinate = false;
    }
    if (ph.has_t1() && t > ph.t1 && w.x + 0.5 * w.y < 0.5 * theta2 + theta1) {
      rep.condition2_persists = false;
    }
  }
  const auto lo = static_cast<std::size_t>(std::ceil(1.0 / (2.0 * eta)));
  const auto hi = static_cast<std::size_t>(std::floor(3.0 / eta));
  rep.t0_in_range = ph.t0 >= lo && ph.t0 <= hi;
  rep.t1_gap_ok = ph.has_t1() && static_cast<double>(ph.t1 - ph.t0) <= 7.0 / eta;
  rep.w1_t0_ratio = ph.w_t0.x / theta2;
  rep.w1_t0_ok = ph.w_t0.x >= 0.03 * theta2;

  rep.raw_distance = norm(tr.output - ph.xi1);
  rep.raw_bound = 120.0 / (eta * static_cast<double>(T));
  rep.raw_ok = rep.raw_distance <= rep.raw_bound;
  return rep;
}

struct ScaledBoundReport {
  double distance = 0.0;  // ||w_F - xi1||
  double bound = 0.0;     // 2640 / (eta T)
  bool ok = false;
  Vec2 output{};
  std::size_t projection_events = 0;
};

/// GD with step eta on the 1/22-scaled segment objective.
inline ScaledBoundReport verify_scaled_bound(double theta1, double theta2, double eta, std::size_t T) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("scaled bound: step size must lie in (0, 1)");
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.store_iterates = false;
  const auto tr = run_gd(SegmentQuadratic(theta1, theta2, Metric2::canonical(), 1.0 / 22.0), cfg);
  ScaledBoundReport r;
  r.output = tr.output;
  r.distance = norm(tr.output - Vec2{theta1, theta2});
  r.bound = 2640.0 / (eta * static_cast<double>(T));
  r.ok = r.distance <= r.bound;
  r.projection_events = tr.projection_events;
  return r;
}

}  // namespace sgdlab
