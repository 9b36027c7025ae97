#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/optimizers.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

/// Value oracle r(w) >= 0 with declared structural metadata.
class Regularizer {
 public:
  using Fn = std::function<double(const VecD&)>;

  Regularizer(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {
    if (!fn_) throw InvalidArgument("Regularizer: empty value oracle");
  }

  const std::string& name() const { return name_; }

  double operator()(const VecD& w) const { return fn_(w); }
  double operator()(const Vec2& w) const { return fn_(VecD::from(w)); }

  /// Strong-convexity modulus: r(u) >= r(v) + <grad r(v), u - v> + lambda ||u - v||^2.
  std::optional<double> lambda;
  std::optional<double> lipschitz;
  bool strictly_quasi_convex = false;
  std::string admissibility = "unchecked";

  nlohmann::json describe() const {
    nlohmann::json j{{"name", name_},
                     {"strictly_quasi_convex", strictly_quasi_convex},
                     {"admissibility", admissibility}};
    j["lambda"] = lambda ? nlohmann::json(*lambda) : nlohmann::json(nullptr);
    j["lipschitz"] = lipschitz ? nlohmann::json(*lipschitz) : nlohmann::json(nullptr);
    return j;
  }

 private:
  std::string name_;
  Fn fn_;
};

// ---------------------------------------------------------------------------
// Built-in regularizers
// ---------------------------------------------------------------------------

inline Regularizer sq_norm_regularizer() {
  Regularizer r("sq-norm", [](const VecD& w) { return w.squared_norm(); });
  r.lambda = 1.0;
  r.lipschitz = 10.0;
  r.strictly_quasi_convex = true;
  r.admissibility = "continuous";
  return r;
}

/// ||w - p||^2; p is padded with zeros to the dimension of w.
inline Regularizer shifted_sq_norm_regularizer(std::vector<double> p) {
  if (p.empty()) throw InvalidArgument("shifted-sq-norm: empty shift");
  for (double x : p) {
    if (!std::isfinite(x)) throw InvalidArgument("shifted-sq-norm: non-finite shift");
  }
  std::ostringstream name;
  name.precision(17);
  name << "shifted-sq-norm:";
  for (std::size_t i = 0; i < p.size(); ++i) name << (i ? "," : "") << p[i];
  double pp = 0.0;
  for (double x : p) pp += x * x;
  Regularizer r(name.str(), [p, pp](const VecD& w) {
    if (w.dim() < p.size()) throw InvalidArgument("shifted-sq-norm: point dimension below shift dimension");
    double s = w.squared_norm() + pp;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] != 0.0) s -= 2.0 * p[j] * w.get(j);
    }
    return std::max(0.0, s);
  });
  r.lambda = 1.0;
  r.lipschitz = 20.0;
  r.strictly_quasi_convex = true;
  r.admissibility = "continuous";
  return r;
}

/// ||w||_1 / (5 sqrt 2).
inline Regularizer l1_normalized_regularizer() {
  Regularizer r("l1-normalized", [](const VecD& w) {
    double s = 0.0;
    w.for_each_pair([&](std::size_t, const Vec2& p) { s += std::abs(p.x) + std::abs(p.y); });
    return s / (5.0 * std::numbers::sqrt2);
  });
  r.lipschitz = 0.2;
  r.admissibility = "continuous";
  return r;
}

/// Value table on a regular grid over [x0, x1] x [y0, y1], row-major in y.
struct GridTable {
  double x0 = -5.0, x1 = 5.0, y0 = -5.0, y1 = 5.0;
  std::size_t nx = 2, ny = 2;
  std::vector<double> values;  // values[iy * nx + ix]

  void validate() const {
    if (nx < 2 || ny < 2) throw ConfigError("custom-grid: need at least 2 x 2 nodes");
    if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("custom-grid: empty extent");
    if (values.size() != nx * ny) throw ConfigError("custom-grid: value count must equal nx * ny");
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError("custom-grid: values must be finite and >= 0");
    }
  }

  /// Bilinear interpolation, clamped to the table extent.
  double interpolate(double x, double y) const {
    const double fx = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0) * static_cast<double>(nx - 1);
    const double fy = std::clamp((y - y0) / (y1 - y0), 0.0, 1.0) * static_cast<double>(ny - 1);
    const auto ix = std::min(static_cast<std::size_t>(fx), nx - 2);
    const auto iy = std::min(static_cast<std::size_t>(fy), ny - 2);
    const double tx = fx - static_cast<double>(ix);
    const double ty = fy - static_cast<double>(iy);
    const auto at = [&](std::size_t i, std::size_t j) { return values[j * nx + i]; };
    return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
           (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
  }

  static GridTable from_json(const nlohmann::json& j) {
    GridTable g;
    g.x0 = j.at("x0").get<double>();
    g.x1 = j.at("x1").get<double>();
    g.y0 = j.at("y0").get<double>();
    g.y1 = j.at("y1").get<double>();
    g.nx = j.at("nx").get<std::size_t>();
    g.ny = j.at("ny").get<std::size_t>();
    g.values = j.at("values").get<std::vector<double>>();
    g.validate();
    return g;
  }

  /// Samples f on the grid nodes.
  template <class F>
  static GridTable tabulate(F&& f, std::size_t nx, std::size_t ny, double lo = -5.0, double hi = 5.0) {
    GridTable g{lo, hi, lo, hi, nx, ny, {}};
    g.values.resize(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nx - 1);
        const double y = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ny - 1);
        g.values[j * nx + i] = f(Vec2{x, y});
      }
    }
    g.validate();
    return g;
  }
};

inline Regularizer custom_grid_regularizer(GridTable table) {
  table.validate();
  Regularizer r("custom-grid", [table](const VecD& w) {
    if (w.dim() != 2) throw InvalidArgument("custom-grid: only defined on R^2");
    return table.interpolate(w.get(0), w.get(1));
  });
  r.admissibility = "continuous (bilinear)";
  return r;
}

/// sq-norm | shifted-sq-norm:p1,p2,... | l1-normalized. custom-grid needs a table.
inline Regularizer make_regularizer(const std::string& name) {
  if (name == "sq-norm") return sq_norm_regularizer();
  if (name == "l1-normalized") return l1_normalized_regularizer();
  const std::string prefix = "shifted-sq-norm";
  if (name.rfind(prefix, 0) == 0) {
    std::vector<double> p;
    if (name.size() > prefix.size()) {
      if (name[prefix.size()] != ':') throw ConfigError("unknown regularizer '" + name + "'");
      std::stringstream ss(name.substr(prefix.size() + 1));
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          p.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw ConfigError("shifted-sq-norm: cannot parse shift component '" + item + "'");
        }
      }
    }
    if (p.empty()) throw ConfigError("shifted-sq-norm: shift required, e.g. shifted-sq-norm:0.3,0");
    return shifted_sq_norm_regularizer(std::move(p));
  }
  if (name == "custom-grid") throw ConfigError("custom-grid: a value table is required");
  throw ConfigError("unknown regularizer '" + name + "'");
}

inline std::vector<std::string> regularizer_names() {
  return {"sq-norm", "shifted-sq-norm:<p1,p2>", "l1-normalized", "custom-grid"};
}

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

/// Central finite-difference gradient of r at w in R^2.
inline Vec2 fd_gradient(const Regularizer& r, const Vec2& w, double h = 1e-5) {
  return {(r(Vec2{w.x + h, w.y}) - r(Vec2{w.x - h, w.y})) / (2 * h),
          (r(Vec2{w.x, w.y + h}) - r(Vec2{w.x, w.y - h})) / (2 * h)};
}

struct ProbeReport {
  double grid_min = 0.0;
  double grid_max = 0.0;
  Vec2 argmin{};
  bool normalized = false;    // min <= 1e-6
  bool non_constant = false;  // max - min > 1e-6
  bool strongly_convex = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t pairs_checked = 0;
  bool ok() const { return normalized && non_constant && strongly_convex; }
};

/// Grid scan of the radius-R disc (with pattern-search refinement of the minimum),
/// plus the strong-convexity inequality on random pairs when lambda is declared.
inline ProbeReport probe_regularizer(const Regularizer& r, std::uint64_t seed = 1, double radius = 5.0,
                                     std::size_t grid = 33, std::size_t pairs = 10000) {
  ProbeReport rep;
  rep.grid_min = std::numeric_limits<double>::infinity();
  rep.grid_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const Vec2 w{-radius + 2 * radius * static_cast<double>(i) / static_cast<double>(grid - 1),
                   -radius + 2 * radius * static_cast<double>(j) / static_cast<double>(grid - 1)};
      if (squared_norm(w) > radius * radius) continue;
      const double v = r(w);
      if (v < rep.grid_min) {
        rep.grid_min = v;
        rep.argmin = w;
      }
      if (squared_norm(w) > 0.0) rep.grid_max = std::max(rep.grid_max, v);
    }
  }
  // Pattern search from the best node.
  double step = 2 * radius / static_cast<double>(grid - 1);
  Vec2 best = rep.argmin;
  double fbest = rep.grid_min;
  while (step > 1e-10) {
    bool moved = false;
    for (const Vec2 d : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
      const Vec2 cand = best + step * d;
      if (squared_norm(cand) > radius * radius) continue;
      const double v = r(cand);
      if (v < fbest) {
        fbest = v;
        best = cand;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  rep.grid_min = fbest;
  rep.argmin = best;
  rep.normalized = rep.grid_min <= 1e-6;
  rep.non_constant = rep.grid_max - rep.grid_min > 1e-6;

  if (r.lambda) {
    Rng rng(seed);
    const auto draw = [&] {
      while (true) {
        const Vec2 w{radius * (2 * uniform01(rng) - 1), radius * (2 * uniform01(rng) - 1)};
        if (squared_norm(w) <= radius * radius) return w;
      }
    };
    for (std::size_t k = 0; k < pairs; ++k) {
      const Vec2 u = draw();
      const Vec2 v = draw();
      const double slack = r(u) - r(v) - dot(fd_gradient(r, v), u - v) - *r.lambda * squared_norm(u - v);
      rep.worst_slack = std::min(rep.worst_slack, slack);
      if (slack < -1e-6) rep.strongly_convex = false;
    }
    rep.pairs_checked = pairs;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Competitive set and certificates
// ---------------------------------------------------------------------------

/// u in K_{S,r}(w_S): F_S(u) <= F_S(w_S) and r(u) <= r(w_S), both up to 1e-12.
template <class P, class FS>
bool k_membership(const P& u, const P& w_S, FS&& F_S, const Regularizer& r) {
  return F_S(u) <= F_S(w_S) + 1e-12 && r(u) <= r(w_S) + 1e-12;
}

struct ViolationCertificate {
  VecD w_S;
  VecD w_star;
  double F_gap = 0.0;  // F_S(w_S) - F_S(w*)
  double r_gap = 0.0;  // r(w_S) - r(w*)
  double margin = 0.0;
  bool valid = false;
  nlohmann::json context = nlohmann::json::object();

  nlohmann::json to_json() const {
    return {{"w_S", w_S.coords()}, {"w_star", w_star.coords()}, {"F_gap", F_gap},
            {"r_gap", r_gap},      {"margin", margin},          {"valid", valid},
            {"context", context}};
  }
};

namespace detail {
inline VecD as_vecd(const Vec2& w) { return VecD::from(w); }
inline const VecD& as_vecd(const VecD& w) { return w; }
}  // namespace detail

/// Valid iff F_gap >= -1e-12 and r_gap > margin.
template <class P, class FS>
ViolationCertificate violation_certificate(const P& w_S, FS&& F_S, const Regularizer& r, const P& w_star,
                                           double margin = 0.0,
                                           nlohmann::json context = nlohmann::json::object()) {
  ViolationCertificate c;
  c.w_S = detail::as_vecd(w_S);
  c.w_star = detail::as_vecd(w_star);
  c.F_gap = F_S(w_S) - F_S(w_star);
  c.r_gap = r(w_S) - r(w_star);
  c.margin = margin;
  c.valid = c.F_gap >= -1e-12 && c.r_gap > margin;
  c.context = std::move(context);
  return c;
}

// ---------------------------------------------------------------------------
// Segment minimization
// ---------------------------------------------------------------------------

struct SegmentMin {
  Vec2 point{};
  double s = 0.0;  // point = a + s (b - a)
  double value = 0.0;
};

inline SegmentMin min_over_segment(const Regularizer& r, const Vec2& a, const Vec2& b, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("min_over_segment: tol must be positive");
  const auto at = [&](double s) { return a + s * (b - a); };
  const auto f = [&](double s) { return r(at(s)); };
  SegmentMin out;
  if (r.lambda || r.strictly_quasi_convex) {
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (f(m1) <= f(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    // Endpoint check keeps exact boundary minima exact.
    double s = 0.5 * (lo + hi);
    double v = f(s);
    for (double e : {0.0, 1.0}) {
      const double fe = f(e);
      if (fe < v || (fe == v && e < s)) {
        s = e;
        v = fe;
      }
    }
    if (std::abs(s - lo) <= tol && f(lo) <= v) {
      s = lo;
      v = f(lo);
    }
    out.s = s;
    out.value = v;
  } else {
    const auto n = static_cast<std::size_t>(std::ceil(1.0 / tol));
    double best_s = 0.0;
    double best_v = f(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n);
      const double v = f(s);
      if (v < best_v) {
        best_v = v;
        best_s = s;
      }
    }
    // Golden-section refinement within the neighbouring cells.
    double lo = std::max(0.0, best_s - 1.0 / static_cast<double>(n));
    double hi = std::min(1.0, best_s + 1.0 / static_cast<double>(n));
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double m1 = hi - g * (hi - lo);
      const double m2 = lo + g * (hi - lo);
      if (f(m1) <= f(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    const double s_ref = 0.5 * (lo + hi);
    if (f(s_ref) < best_v) {
      best_v = f(s_ref);
      best_s = s_ref;
    }
    out.s = best_s;
    out.value = best_v;
  }
  out.point = at(out.s);
  return out;
}

// ---------------------------------------------------------------------------
// Distribution-independent constructions
// ---------------------------------------------------------------------------

using PlanarObjective = std::variant<EuclideanSegment, SegmentQuadratic,
                                     OrthogonalTransformed<EuclideanSegment>,
                                     OrthogonalTransformed<SegmentQuadratic>>;

inline double objective_value(const PlanarObjective& obj, const Vec2& w) {
  return std::visit([&](const auto& o) { return o.value(w); }, obj);
}

inline Vec2 objective_grad(const PlanarObjective& obj, const Vec2& w) {
  return std::visit([&](const auto& o) { return o.grad(w); }, obj);
}

/// Closest point of the objective's zero set.
inline Vec2 objective_nearest(const PlanarObjective& obj, const Vec2& w) {
  return std::visit(
      [&](const auto& o) -> Vec2 {
        using O = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<O, EuclideanSegment> || std::is_same_v<O, SegmentQuadratic>) {
          return o.nearest(w);
        } else {
          const Vec2 x = o.map().apply(w);
          return o.map().apply_transpose(o.inner().nearest(x));
        }
      },
      obj);
}

inline Trace<Vec2, Unit> run_gd_planar(const PlanarObjective& obj, const RunConfig& cfg) {
  return std::visit([&](const auto& o) { return run_gd(o, cfg); }, obj);
}

struct WarmupConstruction {
  int case_id = 0;  // 1: Euclidean segment, 2: scaled segment objective
  PlanarObjective objective{SegmentQuadratic(0.0, 1.0)};
  Vec2 w_star{};    // minimizer of r over [e2, c]
  Vec2 w_r{};
  double predicted_gap = 0.0;  // -2640/(T eta) + 1e-4 lambda
};

inline WarmupConstruction build_warmup_construction(const Regularizer& r, double eta = 0.5,
                                                    std::size_t T = 100000) {
  if (!r.lambda || !(*r.lambda > 0.0)) {
    throw ConfigError("warmup: regularizer must declare a positive strong-convexity modulus");
  }
  const ProbeReport probe = probe_regularizer(r);
  if (!probe.strongly_convex) throw ConfigError("warmup: regularizer fails the strong-convexity probe");

  const Vec2 e2{0.0, 1.0};
  const Vec2 c{0.024, 1.0};
  const SegmentMin sm = min_over_segment(r, e2, c, 1e-10);
  const double pred = -2640.0 / (static_cast<double>(T) * eta) + 1e-4 * *r.lambda;
  if (norm(sm.point - e2) >= 0.012) {
    return {1, EuclideanSegment(e2, c), sm.point, sm.point, pred};
  }
  return {2, SegmentQuadratic(0.024, 1.0, Metric2::canonical(), 1.0 / 22.0), sm.point, sm.point, pred};
}

struct WarmupResult {
  WarmupConstruction construction;
  Vec2 w_S{};
  ViolationCertificate certificate;
  std::size_t projection_events = 0;
};

/// Runs GD on the warm-up objective and certifies the best of two witnesses: w_r itself and
/// w_r shifted by (1 - kappa)(w_S - v(w_S)), which keeps the empirical loss strictly below F(w_S).
inline WarmupResult run_warmup(const Regularizer& r, double eta, std::size_t T, double margin = 0.0,
                               double kappa = 1e-6) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("warmup: step size must lie in (0, 1)");
  WarmupResult res;
  res.construction = build_warmup_construction(r, eta, T);
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = T;
  cfg.radius = 5.0;
  cfg.store_iterates = false;
  const auto tr = run_gd_planar(res.construction.objective, cfg);
  res.w_S = tr.output;
  res.projection_events = tr.projection_events;

  const auto F = [&](const Vec2& w) { return objective_value(res.construction.objective, w); };
  const Vec2 offset = res.w_S - objective_nearest(res.construction.objective, res.w_S);
  const Vec2 shifted = res.construction.w_r + (1.0 - kappa) * offset;

  const nlohmann::json base{{"construction", "warmup"},
                            {"case", res.construction.case_id},
                            {"eta", eta},
                            {"T", T},
                            {"regularizer", r.describe()},
                            {"predicted_gap", res.construction.predicted_gap}};
  auto c1 = violation_certificate(res.w_S, F, r, res.construction.w_r, margin, base);
  c1.context["witness"] = "w_r";
  auto c2 = violation_certificate(res.w_S, F, r, shifted, margin, base);
  c2.context["witness"] = "w_r + (1-kappa)(w_S - v(w_S))";
  c2.context["kappa"] = kappa;
  if (c1.valid && (!c2.valid || c1.r_gap >= c2.r_gap)) {
    res.certificate = c1;
  } else if (c2.valid) {
    res.certificate = c2;
  } else {
    res.certificate = c1.r_gap >= c2.r_gap ? c1 : c2;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Arbitrary admissible regularizers
// ---------------------------------------------------------------------------

struct Fichs1Pair {
  Vec2 w1{};
  Vec2 w2{};
  double delta = 0.0;
  double r_diff = 0.0;  // r(w1) - r(w2)
};

/// Scans circles of radius 0.1 j (j = 1..9) at angular resolution `resolution` for
/// w2 = w1 + delta w1_perp with |delta| < 0.005 ||w1|| and the largest |r(w1) - r(w2)|.
inline Fichs1Pair fichs1_search(const Regularizer& r, double resolution) {
  if (!(resolution > 0.0)) throw InvalidArgument("fichs1_search: resolution must be positive");
  const auto n_angles = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / resolution));
  Fichs1Pair best;
  double best_abs = 0.0;
  for (int j = 1; j <= 9; ++j) {
    const double a = 0.1 * j;
    const double dmax = 0.999 * 0.005 * a;
    for (std::size_t i = 0; i < n_angles; ++i) {
      const double phi = static_cast<double>(i) * resolution;
      const Vec2 w1{a * std::sin(phi), a * std::cos(phi)};
      const double r1 = r(w1);
      for (double frac : {1.0, -1.0, 0.5, -0.5, 0.25, -0.25}) {
        const double delta = frac * dmax;
        const Vec2 w2 = w1 + delta * perp(w1);
        const double diff = r1 - r(w2);
        if (std::abs(diff) > best_abs) {
          best_abs = std::abs(diff);
          best = {w1, w2, delta, diff};
        }
      }
    }
  }
  if (!(best_abs > 1e-9)) throw NotFound("fichs1_search: regularizer is numerically constant at this resolution");
  return best;
}

struct GdrConstruction {
  int case_id = 0;  // 1: r(w1) > r(w2), 2: r(w1) < r(w2)
  PlanarObjective objective{SegmentQuadratic(0.0, 1.0)};
  Orthogonal2 map;  // original -> construction frame
  Fichs1Pair pair;
  Vec2 w_r{};
  Vec2 target{};           // point GD approaches
  double c_r = 0.0;
  double neighborhood = 0.0;  // estimated radius around target where r > r(w_r) + c_r
  std::size_t T_r = 0;
  bool capped = false;
};

/// Largest radius 0.1 * 2^-m around `center` whose probe circles keep r above `level`.
inline double estimate_neighborhood(const Regularizer& r, const Vec2& center, double level) {
  for (int m = 0; m <= 60; ++m) {
    const double rad = 0.1 * std::ldexp(1.0, -m);
    bool ok = r(center) > level;
    for (double shrink : {1.0, 0.5, 0.25}) {
      for (int k = 0; k < 32 && ok; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 32.0;
        ok = r(center + shrink * rad * Vec2{std::cos(th), std::sin(th)}) > level;
      }
    }
    if (ok) return rad;
  }
  throw NotFound("estimate_neighborhood: no neighborhood keeps the regularizer gap");
}

inline GdrConstruction build_gdr_construction(const Regularizer& r, const Fichs1Pair& pair, double eta,
                                              std::size_t T_cap = 20000000) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("gdr: step size must lie in (0, 1)");
  GdrConstruction g;
  g.pair = pair;
  const double a = norm(pair.w1);
  g.c_r = 0.5 * std::abs(pair.r_diff);
  Orthogonal2 q = Orthogonal2::rotate_onto_e2(pair.w1);
  if (pair.delta < 0.0) q = q.reflect_first();
  g.map = q;
  const Vec2 w1c{0.0, a};
  const Vec2 w2c{std::abs(pair.delta) * a, a};
  if (pair.r_diff > 0.0) {
    g.case_id = 1;
    g.objective = OrthogonalTransformed<EuclideanSegment>(EuclideanSegment(w1c, w2c), q);
    g.w_r = pair.w2;
    g.target = pair.w1;
  } else {
    g.case_id = 2;
    g.objective = OrthogonalTransformed<SegmentQuadratic>(
        SegmentQuadratic(std::abs(pair.delta) * a, a, Metric2::canonical(), 1.0 / 22.0), q);
    g.w_r = pair.w1;
    g.target = pair.w2;
  }
  g.neighborhood = estimate_neighborhood(r, g.target, r(g.w_r) + g.c_r);
  const double t_r = std::ceil(2640.0 / (eta * g.neighborhood));
  g.capped = t_r > static_cast<double>(T_cap);
  g.T_r = g.capped ? T_cap : static_cast<std::size_t>(t_r);
  return g;
}

struct GdrResult {
  GdrConstruction construction;
  Vec2 w_S{};
  ViolationCertificate certificate;
};

inline GdrResult run_gdr(const Regularizer& r, double resolution, double eta, std::size_t T_cap = 20000000) {
  GdrResult res;
  res.construction = build_gdr_construction(r, fichs1_search(r, resolution), eta, T_cap);
  RunConfig cfg;
  cfg.eta = eta;
  cfg.T = res.construction.T_r;
  cfg.store_iterates = false;
  const auto tr = run_gd_planar(res.construction.objective, cfg);
  res.w_S = tr.output;
  const auto F = [&](const Vec2& w) { return objective_value(res.construction.objective, w); };
  const auto& c = res.construction;
  res.certificate = violation_certificate(
      res.w_S, F, r, c.w_r, c.c_r,
      {{"construction", "gdr"},
       {"case", c.case_id},
       {"eta", eta},
       {"T_r", c.T_r},
       {"T_r_capped", c.capped},
       {"c_r", c.c_r},
       {"neighborhood_estimate", c.neighborhood},
       {"delta", c.pair.delta},
       {"w1", {c.pair.w1.x, c.pair.w1.y}},
       {"w2", {c.pair.w2.x, c.pair.w2.y}},
       {"regularizer", r.describe()}});
  return res;
}

}  // namespace sgdlab
