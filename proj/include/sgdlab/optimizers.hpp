#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/stats.hpp"

namespace sgdlab {

enum class OutputMode { Average, Last };

inline std::string to_string(OutputMode m) { return m == OutputMode::Average ? "average" : "last"; }

inline OutputMode parse_output_mode(const std::string& s) {
  if (s == "average") return OutputMode::Average;
  if (s == "last") return OutputMode::Last;
  throw ConfigError("unknown output mode '" + s + "'");
}

struct RunConfig {
  double eta = 0.1;
  std::size_t T = 1;
  /// Radius of the feasible ball; infinity disables projection.
  double radius = 5.0;
  OutputMode output = OutputMode::Average;
  std::uint64_t seed = 0;
  bool store_iterates = true;
  bool store_gradients = false;

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("RunConfig: eta must be positive and finite");
    if (T < 1) throw ConfigError("RunConfig: T must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("RunConfig: radius must be positive");
  }
  bool projected() const { return std::isfinite(radius); }
};

template <class P, class Z>
struct Trace {
  RunConfig config;
  std::vector<P> iterates;   // w^(1..T) when stored
  P final_iterate{};         // w^(T+1)
  P output{};                // w_S
  std::vector<P> gradients;  // when stored
  std::vector<Z> samples;    // z_1..z_T
  std::size_t projection_events = 0;
  double max_iterate_norm = 0.0;
};

/// Projected SGD over a fixed sample: w^(t+1) = Pi(w^(t) - eta grad f(w^(t); z_t)).
template <class Dist>
auto run_sgd_on_sample(const Dist& dist, const std::vector<typename Dist::instance_type>& sample,
                       const RunConfig& cfg)
    -> Trace<typename Dist::point_type, typename Dist::instance_type> {
  using P = typename Dist::point_type;
  cfg.validate();
  if (sample.size() != cfg.T) throw InvalidArgument("run_sgd_on_sample: sample length must equal T");

  Trace<P, typename Dist::instance_type> tr;
  tr.config = cfg;
  tr.samples = sample;
  if (cfg.store_iterates) tr.iterates.reserve(cfg.T);

  P w = dist.zero();
  P sum = dist.zero();
  const double r2 = cfg.radius * cfg.radius;
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    if (cfg.store_iterates) tr.iterates.push_back(w);
    if (cfg.output == OutputMode::Average) axpy(sum, 1.0, w);
    tr.max_iterate_norm = std::max(tr.max_iterate_norm, std::sqrt(squared_norm(w)));

    P g = dist.grad(sample[t - 1], w);
    if (!all_finite(g)) {
      throw NumericalError("non-finite gradient at t=" + std::to_string(t) + ", w=" + to_string(w));
    }
    axpy(w, -cfg.eta, g);
    if (cfg.store_gradients) tr.gradients.push_back(std::move(g));
    if (cfg.projected() && squared_norm(w) > r2) {
      w = project_ball(std::move(w), cfg.radius);
      ++tr.projection_events;
    }
    if (!all_finite(w)) {
      throw NumericalError("non-finite iterate at t=" + std::to_string(t + 1));
    }
  }
  tr.final_iterate = w;
  if (cfg.output == OutputMode::Average) {
    tr.output = scaled(std::move(sum), 1.0 / static_cast<double>(cfg.T));
  } else {
    tr.output = w;
  }
  return tr;
}

template <class Dist>
std::vector<typename Dist::instance_type> draw_sample(const Dist& dist, std::size_t T, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<typename Dist::instance_type> s;
  s.reserve(T);
  for (std::size_t t = 0; t < T; ++t) s.push_back(dist.sample(rng));
  return s;
}

template <class Dist>
auto run_sgd(const Dist& dist, const RunConfig& cfg) {
  cfg.validate();
  return run_sgd_on_sample(dist, draw_sample(dist, cfg.T, cfg.seed), cfg);
}

/// Full-batch projected GD on a deterministic objective.
template <class Obj>
auto run_gd(const Obj& obj, const RunConfig& cfg) {
  cfg.validate();
  return run_sgd_on_sample(PointMass<Obj>(obj), std::vector<Unit>(cfg.T), cfg);
}

/// Mean of the stored iterates, summed in order.
template <class P, class Z>
P reaverage(const Trace<P, Z>& tr) {
  if (tr.iterates.empty()) throw InvalidArgument("reaverage: iterates were not stored");
  P sum = tr.iterates.front();
  for (std::size_t t = 1; t < tr.iterates.size(); ++t) axpy(sum, 1.0, tr.iterates[t]);
  return scaled(std::move(sum), 1.0 / static_cast<double>(tr.iterates.size()));
}

struct RegretReport {
  double mean_excess = 0.0;
  double ci_half_width = 0.0;
  double bound = 0.0;  // B rho / sqrt(T)
  std::size_t trials = 0;
  bool violation = false;  // CI lower end above the bound
  bool pass = false;       // mean <= bound + 3 CI
};

/// E[F(w_S)] - F(w*) over independent runs against B rho / sqrt(T).
template <class Dist, class PopF>
RegretReport sgd_regret_check(const Dist& dist, PopF&& population, const RunConfig& cfg,
                              const typename Dist::point_type& w_star, std::size_t trials, double B,
                              double rho) {
  cfg.validate();
  if (trials < 1) throw InvalidArgument("sgd_regret_check: trials must be >= 1");
  const double f_star = population(w_star);
  RunConfig c = cfg;
  c.store_iterates = false;
  const auto excess = parallel_map(trials, [&](std::size_t i) {
    RunConfig ci = c;
    ci.seed = derive_seed(cfg.seed, i);
    const auto tr = run_sgd(dist, ci);
    return population(tr.output) - f_star;
  });
  const MeanCI m = mean_ci(excess);
  RegretReport r;
  r.mean_excess = m.mean;
  r.ci_half_width = m.half_width;
  r.bound = B * rho / std::sqrt(static_cast<double>(cfg.T));
  r.trials = trials;
  r.violation = m.mean - m.half_width > r.bound;
  r.pass = m.mean <= r.bound + 3.0 * m.half_width;
  return r;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

namespace detail {

inline void csv_point(std::ostream& os, std::size_t t, const Vec2& w) {
  os << t << ',' << w.x << ',' << w.y << '\n';
}

inline void csv_point(std::ostream& os, std::size_t t, const VecD& w) {
  w.for_each_pair([&](std::size_t i, const Vec2& p) {
    if (p.x == 0.0 && p.y == 0.0) return;
    os << t << ',' << i << ',' << p.x << ',' << p.y << '\n';
  });
}

inline const char* csv_header(const Vec2&) { return "t,w1,w2\n"; }
inline const char* csv_header(const VecD&) { return "t,pair,x,y\n"; }

inline nlohmann::json point_json(const Vec2& w) { return nlohmann::json::array({w.x, w.y}); }

inline nlohmann::json point_json(const VecD& w) {
  nlohmann::json pairs = nlohmann::json::array();
  w.for_each_pair([&](std::size_t i, const Vec2& p) {
    if (p.x != 0.0 || p.y != 0.0) pairs.push_back({i, p.x, p.y});
  });
  return {{"dim", w.dim()}, {"pairs", pairs}};
}

inline nlohmann::json sample_json(const Unit&) { return nullptr; }
inline nlohmann::json sample_json(int z) { return z; }
inline nlohmann::json sample_json(const ProductInstance& z) { return instance_to_json(z); }

}  // namespace detail

/// Iterates (or the output alone when iterates were not stored) as CSV; t = 0 marks w_S.
template <class P, class Z>
std::string trace_to_csv(const Trace<P, Z>& tr) {
  std::ostringstream os;
  os.precision(17);
  os << detail::csv_header(tr.output);
  for (std::size_t t = 0; t < tr.iterates.size(); ++t) detail::csv_point(os, t + 1, tr.iterates[t]);
  detail::csv_point(os, 0, tr.output);
  return os.str();
}

template <class P, class Z>
nlohmann::json trace_to_json(const Trace<P, Z>& tr) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& z : tr.samples) samples.push_back(detail::sample_json(z));
  return {{"config",
           {{"eta", tr.config.eta},
            {"T", tr.config.T},
            {"radius", tr.config.projected() ? nlohmann::json(tr.config.radius) : nlohmann::json("inf")},
            {"output_mode", to_string(tr.config.output)},
            {"seed", tr.config.seed}}},
          {"samples", samples},
          {"output", detail::point_json(tr.output)},
          {"final_iterate", detail::point_json(tr.final_iterate)},
          {"projection_events", tr.projection_events}};
}

}  // namespace sgdlab
