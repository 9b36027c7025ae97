#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

// ---------------------------------------------------------------------------
// Deterministic objectives over R^2
// ---------------------------------------------------------------------------

/// gamma * 1/2 * (w - v(w))^T Sigma (w - v(w)), v(w) the Sigma-projection onto
/// A = {(a, theta2) : 0 <= a <= theta1}.
class SegmentQuadratic {
 public:
  using point_type = Vec2;

  SegmentQuadratic(double theta1, double theta2, Metric2 metric = Metric2::canonical(),
                   double gamma = 1.0)
      : theta1_(theta1), theta2_(theta2), metric_(metric), gamma_(gamma) {
    if (!(theta1 >= 0.0) || !std::isfinite(theta1)) {
      throw InvalidArgument("SegmentQuadratic: theta1 must be finite and >= 0");
    }
    if (!(theta2 > 0.0 && theta2 <= 1.0)) {
      throw InvalidArgument("SegmentQuadratic: theta2 must lie in (0, 1]");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw InvalidArgument("SegmentQuadratic: scale must be positive");
    }
  }

  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  double gamma() const { return gamma_; }
  const Metric2& metric() const { return metric_; }

  Vec2 zero() const { return {}; }

  Vec2 nearest(const Vec2& w) const { return project_segment_metric(w, theta1_, theta2_, metric_); }

  double value(const Vec2& w) const {
    const Vec2 d = w - nearest(w);
    return gamma_ * 0.5 * metric_.quadratic(d);
  }

  Vec2 grad(const Vec2& w) const { return gamma_ * metric_.apply(w - nearest(w)); }

  /// True when theta1 <= 0.025 theta2.
  bool thin() const { return theta1_ <= 0.025 * theta2_; }

 private:
  double theta1_;
  double theta2_;
  Metric2 metric_;
  double gamma_;
};

/// gamma * min_{v in [a, b]} ||w - v||^2.
class EuclideanSegment {
 public:
  using point_type = Vec2;

  static constexpr double kDefaultScale = 1.0 / 5280.0;

  EuclideanSegment(Vec2 a, Vec2 b, double gamma = kDefaultScale) : a_(a), b_(b), gamma_(gamma) {
    if (!all_finite(a) || !all_finite(b)) throw InvalidArgument("EuclideanSegment: non-finite endpoint");
    if (!(gamma > 0.0)) throw InvalidArgument("EuclideanSegment: scale must be positive");
  }

  const Vec2& a() const { return a_; }
  const Vec2& b() const { return b_; }
  double gamma() const { return gamma_; }

  Vec2 zero() const { return {}; }
  Vec2 nearest(const Vec2& w) const { return project_segment(w, a_, b_); }
  double value(const Vec2& w) const { return gamma_ * squared_norm(w - nearest(w)); }
  Vec2 grad(const Vec2& w) const { return 2.0 * gamma_ * (w - nearest(w)); }

 private:
  Vec2 a_, b_;
  double gamma_;
};

/// Orthogonal 2x2 map [[q11, q12], [q21, q22]].
struct Orthogonal2 {
  double q11 = 1.0, q12 = 0.0, q21 = 0.0, q22 = 1.0;

  Vec2 apply(const Vec2& w) const { return {q11 * w.x + q12 * w.y, q21 * w.x + q22 * w.y}; }
  Vec2 apply_transpose(const Vec2& w) const { return {q11 * w.x + q21 * w.y, q12 * w.x + q22 * w.y}; }
  Orthogonal2 transpose() const { return {q11, q21, q12, q22}; }
  double det() const { return q11 * q22 - q12 * q21; }

  /// Rotation taking u (nonzero) to ||u|| e_2.
  static Orthogonal2 rotate_onto_e2(const Vec2& u) {
    const double n = norm(u);
    if (!(n > 0.0)) throw InvalidArgument("Orthogonal2: cannot rotate the zero vector");
    const double s = u.x / n;
    const double c = u.y / n;
    return {c, -s, s, c};
  }

  /// Negates the first coordinate after applying this map.
  Orthogonal2 reflect_first() const { return {-q11, -q12, q21, q22}; }
};

/// x -> obj(Q x), gradient Q^T grad obj(Q x).
template <class Obj>
class OrthogonalTransformed {
 public:
  using point_type = Vec2;

  OrthogonalTransformed(Obj obj, Orthogonal2 q) : obj_(std::move(obj)), q_(q) {}

  const Obj& inner() const { return obj_; }
  const Orthogonal2& map() const { return q_; }

  Vec2 zero() const { return {}; }
  double value(const Vec2& w) const { return obj_.value(q_.apply(w)); }
  Vec2 grad(const Vec2& w) const { return q_.apply_transpose(obj_.grad(q_.apply(w))); }

 private:
  Obj obj_;
  Orthogonal2 q_;
};

/// Objective that is identically zero.
template <class P = Vec2>
class ZeroObjective {
 public:
  using point_type = P;
  explicit ZeroObjective(P zero = P{}) : zero_(std::move(zero)) {}
  P zero() const { return zero_; }
  double value(const P&) const { return 0.0; }
  P grad(const P&) const { return zero_; }

 private:
  P zero_;
};

/// Linear objective <g, w>.
class LinearObjective {
 public:
  using point_type = Vec2;
  explicit LinearObjective(Vec2 g) : g_(g) {}
  Vec2 zero() const { return {}; }
  double value(const Vec2& w) const { return dot(g_, w); }
  Vec2 grad(const Vec2&) const { return g_; }

 private:
  Vec2 g_;
};

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

struct Unit {
  friend bool operator==(const Unit&, const Unit&) = default;
};

/// Distribution concentrated on a single deterministic objective.
template <class Obj>
class PointMass {
 public:
  using point_type = typename Obj::point_type;
  using instance_type = Unit;

  explicit PointMass(Obj obj) : obj_(std::move(obj)) {}
  const Obj& objective() const { return obj_; }

  point_type zero() const { return obj_.zero(); }
  Unit sample(Rng&) const { return {}; }
  double value(const Unit&, const point_type& w) const { return obj_.value(w); }
  point_type grad(const Unit&, const point_type& w) const { return obj_.grad(w); }

 private:
  Obj obj_;
};

/// rho * max{0, -v_z^T w + c ||v_z||^2}, v_1 = -(1/4, 3/4), v_{-1} = -(0, 3/4).
class HingePair {
 public:
  HingePair(double c, double rho) : c_(c), rho_(rho) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("HingePair: c must be positive");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("HingePair: rho must be positive");
  }

  double c() const { return c_; }
  double rho() const { return rho_; }

  static Vec2 anchor(int z) {
    check_label(z);
    return z == 1 ? Vec2{-0.25, -0.75} : Vec2{0.0, -0.75};
  }

  /// Inside of the max; the function is flat where this is <= 0.
  double margin(const Vec2& w, int z) const {
    const Vec2 v = anchor(z);
    return -dot(v, w) + c_ * squared_norm(v);
  }

  double value(const Vec2& w, int z) const { return rho_ * std::max(0.0, margin(w, z)); }

  Vec2 grad(const Vec2& w, int z) const {
    if (margin(w, z) <= 0.0) return {};
    return -rho_ * anchor(z);
  }

  /// v_{z,eta} = -eta grad f(0; z).
  Vec2 frozen_point(int z, double eta) const { return -eta * grad(Vec2{}, z); }

  /// Largest c for which both v_{1,eta} and v_{-1,eta} sit on the flat part of both functions.
  static double freeze_limit(double eta, double rho) { return 0.9 * eta * rho; }

 private:
  static void check_label(int z) {
    if (z != 1 && z != -1) throw InvalidArgument("HingePair: label must be +1 or -1");
  }
  double c_;
  double rho_;
};

/// z uniform on {+1, -1}, f(w; z) the hinge pair.
class HingeDistribution {
 public:
  using point_type = Vec2;
  using instance_type = int;

  explicit HingeDistribution(HingePair hp) : hp_(hp) {}
  const HingePair& hinge() const { return hp_; }

  Vec2 zero() const { return {}; }
  int sample(Rng& rng) const { return random_sign(rng); }
  double value(int z, const Vec2& w) const { return hp_.value(w, z); }
  Vec2 grad(int z, const Vec2& w) const { return hp_.grad(w, z); }
  double population_value(const Vec2& w) const { return 0.5 * (hp_.value(w, 1) + hp_.value(w, -1)); }

 private:
  HingePair hp_;
};

/// One draw of a product distribution: k (pair index, sign) entries, pair indices 1-based.
struct ProductInstance {
  std::vector<std::pair<std::size_t, int>> entries;
  friend bool operator==(const ProductInstance&, const ProductInstance&) = default;
};

/// (1/k) sum_l f((w_{2 i_l - 1}, w_{2 i_l}); z_l) over k distinct pairs of R^d.
/// k = 1 with 5T pairs gives the paired product; larger k the averaged product.
class ProductDistribution {
 public:
  using point_type = VecD;
  using instance_type = ProductInstance;

  ProductDistribution(std::size_t dim, std::size_t k, HingePair hp) : dim_(dim), k_(k), hp_(hp) {
    if (dim < 2) throw InvalidArgument("ProductDistribution: dimension must be >= 2");
    if (k < 1) throw InvalidArgument("ProductDistribution: k must be >= 1");
    if (k > dim / 2) throw InvalidArgument("ProductDistribution: k exceeds the number of pairs");
  }

  /// d = 10 T, single pair per draw, c = 1/(8 T^2).
  static ProductDistribution paired(std::size_t T, double rho, double c = 0.0) {
    if (T < 1) throw InvalidArgument("paired product: T must be >= 1");
    const double Td = static_cast<double>(T);
    return ProductDistribution(10 * T, 1, HingePair(c > 0.0 ? c : 1.0 / (8.0 * Td * Td), rho));
  }

  /// d = dim_factor * T, k distinct pairs per draw, c = 1/(8 k T^2).
  static ProductDistribution averaged(std::size_t T, std::size_t k, double rho, double c = 0.0,
                                      std::size_t dim_factor = 100000) {
    if (T < 1) throw InvalidArgument("averaged product: T must be >= 1");
    const double Td = static_cast<double>(T);
    const double cc = c > 0.0 ? c : 1.0 / (8.0 * static_cast<double>(k) * Td * Td);
    return ProductDistribution(dim_factor * T, k, HingePair(cc, rho));
  }

  std::size_t dim() const { return dim_; }
  std::size_t k() const { return k_; }
  std::size_t num_pairs() const { return dim_ / 2; }
  const HingePair& hinge() const { return hp_; }

  VecD zero() const { return VecD::zeros(dim_); }

  ProductInstance sample(Rng& rng) const {
    ProductInstance z;
    z.entries.reserve(k_);
    while (z.entries.size() < k_) {
      const std::size_t i = 1 + uniform_below(rng, num_pairs());
      const bool dup = std::any_of(z.entries.begin(), z.entries.end(),
                                   [&](const auto& e) { return e.first == i; });
      if (dup) continue;
      z.entries.emplace_back(i, random_sign(rng));
    }
    return z;
  }

  void validate(const ProductInstance& z) const {
    if (z.entries.size() != k_) throw InvalidInstance("product instance: wrong number of pairs");
    for (std::size_t a = 0; a < z.entries.size(); ++a) {
      const auto& [i, s] = z.entries[a];
      if (i < 1 || i > num_pairs()) throw InvalidInstance("product instance: pair index out of range");
      if (s != 1 && s != -1) throw InvalidInstance("product instance: sign must be +1 or -1");
      for (std::size_t b = 0; b < a; ++b) {
        if (z.entries[b].first == i) throw InvalidInstance("product instance: duplicate pair index");
      }
    }
  }

  double value(const ProductInstance& z, const VecD& w) const {
    validate(z);
    double s = 0.0;
    for (const auto& [i, sign] : z.entries) s += hp_.value(w.pair(i), sign);
    return s / static_cast<double>(k_);
  }

  VecD grad(const ProductInstance& z, const VecD& w) const {
    validate(z);
    VecD g = VecD::zeros(dim_);
    const double inv_k = 1.0 / static_cast<double>(k_);
    for (const auto& [i, sign] : z.entries) {
      Vec2 p = hp_.grad(w.pair(i), sign);
      if (k_ > 1) p *= inv_k;
      g.set_pair(i, p);
    }
    return g;
  }

 private:
  std::size_t dim_;
  std::size_t k_;
  HingePair hp_;
};

/// f(w;1) = w1 1{w in A}, f(w;2) = -w1 1{w in A}, f(w;3) = w2, f(w;4) = -w2,
/// A the closed square |w_i| <= 1/4.
class SquareWalkDistribution {
 public:
  using point_type = Vec2;
  using instance_type = int;

  static bool in_square(const Vec2& w) { return std::abs(w.x) <= 0.25 && std::abs(w.y) <= 0.25; }

  Vec2 zero() const { return {}; }

  int sample(Rng& rng) const { return static_cast<int>(rng() >> 62) + 1; }

  double value(int z, const Vec2& w) const {
    switch (z) {
      case 1: return in_square(w) ? w.x : 0.0;
      case 2: return in_square(w) ? -w.x : 0.0;
      case 3: return w.y;
      case 4: return -w.y;
      default: throw InvalidArgument("SquareWalk: label must be in {1,2,3,4}");
    }
  }

  Vec2 grad(int z, const Vec2& w) const {
    switch (z) {
      case 1: return in_square(w) ? Vec2{1.0, 0.0} : Vec2{};
      case 2: return in_square(w) ? Vec2{-1.0, 0.0} : Vec2{};
      case 3: return {0.0, 1.0};
      case 4: return {0.0, -1.0};
      default: throw InvalidArgument("SquareWalk: label must be in {1,2,3,4}");
    }
  }

  double population_value(const Vec2& w) const {
    return 0.25 * (value(1, w) + value(2, w) + value(3, w) + value(4, w));
  }
};

// ---------------------------------------------------------------------------
// Hard distribution on the scaled cube {+-1/sqrt(d)}^d
// ---------------------------------------------------------------------------

/// Cube point as a bitmask: bit j set <=> coordinate j is +1/sqrt(d).
using CubePoint = std::uint64_t;

inline std::uint64_t low_bits(std::size_t d) {
  return d >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
}

inline std::vector<double> cube_coords(CubePoint p, std::size_t d) {
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = ((p >> j) & 1U) ? s : -s;
  return out;
}

/// <u, v> = 1 - 2 Hamming(u, v) / d.
inline double cube_inner(CubePoint u, CubePoint v, std::size_t d) {
  const auto h = std::popcount((u ^ v) & low_bits(d));
  return 1.0 - 2.0 * static_cast<double>(h) / static_cast<double>(d);
}

struct FeldmanInstance {
  std::vector<std::uint64_t> included;  // bitset over support indices
  bool contains(std::size_t j) const { return (included[j / 64] >> (j % 64)) & 1U; }
  friend bool operator==(const FeldmanInstance&, const FeldmanInstance&) = default;
};

/// f(w; V) = max{1/2, max_{v in V} <v, mask * w>} - 1/2, V a random subset of a
/// support whose points pairwise satisfy <v, v'> <= 1/2, each kept with probability 1/2.
class FeldmanHardDistribution {
 public:
  using point_type = std::vector<double>;
  using instance_type = FeldmanInstance;

  static constexpr std::size_t kMaxDim = 64;
  static constexpr std::size_t kExactMaxDim = 24;
  static constexpr std::size_t kCubeScanMaxDim = 20;

  /// Support greedily packed over the whole cube in increasing bitmask order.
  static FeldmanHardDistribution over_cube(std::size_t d, std::size_t cap = 4096) {
    check_dim(d);
    if (d > kCubeScanMaxDim) throw Unsupported("FeldmanHardDistribution: cube scan limited to d <= 20");
    std::vector<CubePoint> all(std::size_t{1} << d);
    for (std::size_t x = 0; x < all.size(); ++x) all[x] = x;
    return FeldmanHardDistribution(d, pack(all, d, cap));
  }

  /// Support greedily packed from the given cube points, in order.
  static FeldmanHardDistribution over_set(std::size_t d, const std::vector<CubePoint>& points,
                                          std::size_t cap = 4096) {
    check_dim(d);
    if (points.empty()) throw InvalidArgument("FeldmanHardDistribution: empty point set");
    return FeldmanHardDistribution(d, pack(points, d, cap));
  }

  FeldmanHardDistribution(std::size_t d, std::vector<CubePoint> support, CubePoint mask = 0)
      : d_(d), support_(std::move(support)), mask_(mask & low_bits(d)) {
    check_dim(d);
    if (support_.empty()) throw InvalidArgument("FeldmanHardDistribution: empty support");
    for (auto& p : support_) p &= low_bits(d);
  }

  std::size_t dim() const { return d_; }
  const std::vector<CubePoint>& support() const { return support_; }
  CubePoint mask() const { return mask_; }
  FeldmanHardDistribution with_mask(CubePoint mask) const {
    return FeldmanHardDistribution(d_, support_, mask);
  }
  /// Minimum Hamming distance of distinct support points.
  std::size_t separation() const { return (d_ + 3) / 4; }

  point_type zero() const { return point_type(d_, 0.0); }

  FeldmanInstance sample(Rng& rng) const {
    FeldmanInstance inst;
    inst.included.resize((support_.size() + 63) / 64);
    for (auto& w : inst.included) w = rng();
    const std::size_t tail = support_.size() % 64;
    if (tail != 0) inst.included.back() &= (std::uint64_t{1} << tail) - 1;
    return inst;
  }

  /// mask * w as a cube point.
  CubePoint flip(CubePoint w) const { return (w ^ mask_) & low_bits(d_); }

  double value(const FeldmanInstance& inst, CubePoint w) const {
    const CubePoint x = flip(w);
    double best = 0.5;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      if (inst.contains(j)) best = std::max(best, cube_inner(support_[j], x, d_));
    }
    return best - 0.5;
  }

  double value(const FeldmanInstance& inst, const point_type& w) const {
    check_point(w);
    double best = 0.5;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      if (inst.contains(j)) best = std::max(best, inner_real(support_[j], w));
    }
    return best - 0.5;
  }

  point_type grad(const FeldmanInstance& inst, const point_type& w) const {
    check_point(w);
    double best = 0.5;
    std::size_t arg = support_.size();
    for (std::size_t j = 0; j < support_.size(); ++j) {
      if (!inst.contains(j)) continue;
      const double a = inner_real(support_[j], w);
      if (a > best) {
        best = a;
        arg = j;
      }
    }
    point_type g(d_, 0.0);
    if (arg == support_.size()) return g;
    const double s = 1.0 / std::sqrt(static_cast<double>(d_));
    for (std::size_t i = 0; i < d_; ++i) {
      const bool up = (support_[arg] >> i) & 1U;
      const bool flipped = (mask_ >> i) & 1U;
      g[i] = (up != flipped) ? s : -s;
    }
    return g;
  }

  /// Support indices j with <v_j, mask * w> > 1/2, i.e. Hamming < d/4.
  std::vector<std::size_t> near_support(CubePoint w) const {
    const CubePoint x = flip(w);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      if (cube_inner(support_[j], x, d_) > 0.5) out.push_back(j);
    }
    return out;
  }

  /// E_V f(w; V) computed exactly: sum_j 2^{-j} (a_j - 1/2) over support inner products
  /// a_1 >= a_2 >= ... exceeding 1/2.
  double population_excess(CubePoint w) const {
    if (d_ > kExactMaxDim) {
      throw Unsupported("feldman population excess: exact mode needs d <= 24; use Monte Carlo");
    }
    const CubePoint x = flip(w);
    std::vector<double> a;
    for (CubePoint v : support_) {
      const double ip = cube_inner(v, x, d_);
      if (ip > 0.5) a.push_back(ip);
    }
    std::sort(a.begin(), a.end(), std::greater<>());
    double s = 0.0;
    double p = 0.5;
    for (double ip : a) {
      s += p * (ip - 0.5);
      p *= 0.5;
    }
    return s;
  }

  double population_excess_mc(CubePoint w, std::size_t samples, std::uint64_t seed) const {
    if (samples == 0) throw InvalidArgument("feldman Monte Carlo: samples must be >= 1");
    Rng rng(seed);
    double s = 0.0;
    for (std::size_t i = 0; i < samples; ++i) s += value(sample(rng), w);
    return s / static_cast<double>(samples);
  }

  double empirical_excess(const std::vector<FeldmanInstance>& sample, CubePoint w) const {
    if (sample.empty()) return 0.0;
    double s = 0.0;
    for (const auto& inst : sample) s += value(inst, w);
    return s / static_cast<double>(sample.size());
  }

  static std::vector<CubePoint> pack(const std::vector<CubePoint>& points, std::size_t d,
                                     std::size_t cap) {
    const auto sep = static_cast<int>((d + 3) / 4);
    const std::uint64_t m = low_bits(d);
    std::vector<CubePoint> out;
    for (CubePoint p : points) {
      if (out.size() >= cap) break;
      p &= m;
      const bool ok = std::all_of(out.begin(), out.end(),
                                  [&](CubePoint q) { return std::popcount(p ^ q) >= sep; });
      if (ok) out.push_back(p);
    }
    return out;
  }

 private:
  static void check_dim(std::size_t d) {
    if (d < 1 || d > kMaxDim) throw InvalidArgument("FeldmanHardDistribution: d must lie in [1, 64]");
  }
  void check_point(const point_type& w) const {
    if (w.size() != d_) throw InvalidArgument("FeldmanHardDistribution: dimension mismatch");
  }
  double inner_real(CubePoint v, const point_type& w) const {
    const double s = 1.0 / std::sqrt(static_cast<double>(d_));
    double acc = 0.0;
    for (std::size_t i = 0; i < d_; ++i) {
      const bool up = (v >> i) & 1U;
      const bool flipped = (mask_ >> i) & 1U;
      acc += ((up != flipped) ? s : -s) * w[i];
    }
    return acc;
  }

  std::size_t d_;
  std::vector<CubePoint> support_;
  CubePoint mask_;
};

// ---------------------------------------------------------------------------
// Instance serialization
// ---------------------------------------------------------------------------

inline nlohmann::json instance_to_json(const ProductInstance& z) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, s] : z.entries) pairs.push_back({{"pair", i}, {"sign", s}});
  return {{"family", "product"}, {"pairs", pairs}};
}

inline ProductInstance product_instance_from_json(const nlohmann::json& j) {
  if (j.value("family", "") != "product") throw ConfigError("instance json: expected family 'product'");
  ProductInstance z;
  for (const auto& e : j.at("pairs")) {
    z.entries.emplace_back(e.at("pair").get<std::size_t>(), e.at("sign").get<int>());
  }
  return z;
}

inline nlohmann::json instance_to_json(int z, const std::string& family) {
  return {{"family", family}, {"z", z}};
}

inline nlohmann::json instance_to_json(const FeldmanInstance& v, const FeldmanHardDistribution& dist) {
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < dist.support().size(); ++j) {
    if (v.contains(j)) members.push_back(j);
  }
  return {{"family", "feldman"},
          {"d", dist.dim()},
          {"shift", 0.5},
          {"mask", dist.mask()},
          {"support_size", dist.support().size()},
          {"members", members}};
}

inline FeldmanInstance feldman_instance_from_json(const nlohmann::json& j,
                                                  const FeldmanHardDistribution& dist) {
  if (j.value("family", "") != "feldman") throw ConfigError("instance json: expected family 'feldman'");
  FeldmanInstance inst;
  inst.included.assign((dist.support().size() + 63) / 64, 0);
  for (const auto& m : j.at("members")) {
    const auto idx = m.get<std::size_t>();
    if (idx >= dist.support().size()) throw ConfigError("instance json: member index out of range");
    inst.included[idx / 64] |= std::uint64_t{1} << (idx % 64);
  }
  return inst;
}

}  // namespace sgdlab
