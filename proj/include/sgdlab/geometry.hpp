#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgdlab/error.hpp"

namespace sgdlab {

// ---------------------------------------------------------------------------
// Vec2
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double squared_norm(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(squared_norm(a)); }
inline bool all_finite(const Vec2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }
constexpr void axpy(Vec2& y, double a, const Vec2& x) {
  y.x += a * x.x;
  y.y += a * x.y;
}
constexpr Vec2 scaled(Vec2 a, double s) { return a *= s; }

/// (w2, -w1): w rotated a quarter turn clockwise.
constexpr Vec2 perp(const Vec2& w) { return {w.y, -w.x}; }

inline std::string to_string(const Vec2& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v.x << ", " << v.y << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Metric2: symmetric positive definite 2x2 matrix
// ---------------------------------------------------------------------------

class Metric2 {
 public:
  /// [[a, b], [b, c]]; throws unless both eigenvalues are strictly positive.
  Metric2(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      throw InvalidArgument("Metric2: non-finite entry");
    }
    auto [lo, hi] = eigenvalues();
    (void)hi;
    if (!(lo > 0.0)) {
      throw InvalidArgument("Metric2: matrix is not positive definite");
    }
  }

  /// [[1, 1/2], [1/2, 1]]
  static Metric2 canonical() { return Metric2(1.0, 0.5, 1.0); }
  static Metric2 identity() { return Metric2(1.0, 0.0, 1.0); }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  Vec2 apply(const Vec2& v) const { return {a_ * v.x + b_ * v.y, b_ * v.x + c_ * v.y}; }
  double quadratic(const Vec2& v) const { return dot(v, apply(v)); }

  /// Ascending eigenvalues.
  std::pair<double, double> eigenvalues() const {
    const double mean = 0.5 * (a_ + c_);
    const double rad = std::hypot(0.5 * (a_ - c_), b_);
    return {mean - rad, mean + rad};
  }

  friend bool operator==(const Metric2&, const Metric2&) = default;

 private:
  double a_, b_, c_;
};

// ---------------------------------------------------------------------------
// VecD: dense up to kSparseThreshold coordinates, pair-sparse above
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSparseThreshold = 64;

class VecD {
 public:
  using PairEntry = std::pair<std::size_t, Vec2>;  // 1-based pair index, value

  VecD() = default;

  /// Zero vector; sparse storage when dim > kSparseThreshold.
  static VecD zeros(std::size_t dim) { return zeros(dim, dim > kSparseThreshold); }

  static VecD zeros(std::size_t dim, bool sparse) {
    if (dim == 0) throw InvalidArgument("VecD: dimension must be >= 1");
    VecD v;
    v.dim_ = dim;
    v.sparse_ = sparse;
    if (!sparse) v.dense_.assign(dim, 0.0);
    return v;
  }

  static VecD from(std::vector<double> coords) {
    if (coords.empty()) throw InvalidArgument("VecD: dimension must be >= 1");
    for (double c : coords) {
      if (!std::isfinite(c)) throw InvalidArgument("VecD: non-finite coordinate");
    }
    VecD v;
    v.dim_ = coords.size();
    v.sparse_ = false;
    v.dense_ = std::move(coords);
    return v;
  }

  static VecD from(const Vec2& p) { return from(std::vector<double>{p.x, p.y}); }

  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return sparse_; }
  std::size_t num_pairs() const { return (dim_ + 1) / 2; }

  /// 0-based coordinate access.
  double get(std::size_t j) const {
    check_coord(j);
    if (!sparse_) return dense_[j];
    const auto* e = find_pair(j / 2 + 1);
    if (e == nullptr) return 0.0;
    return (j % 2 == 0) ? e->second.x : e->second.y;
  }

  void set(std::size_t j, double value) {
    check_coord(j);
    if (!std::isfinite(value)) throw InvalidArgument("VecD::set: non-finite value");
    if (!sparse_) {
      dense_[j] = value;
      return;
    }
    Vec2 p = pair(j / 2 + 1);
    if (j % 2 == 0) {
      p.x = value;
    } else {
      p.y = value;
    }
    set_pair(j / 2 + 1, p);
  }

  /// Coordinates (2i-1, 2i) in 1-based numbering.
  Vec2 pair(std::size_t i) const {
    check_pair(i);
    if (!sparse_) {
      const std::size_t j = 2 * (i - 1);
      return {dense_[j], j + 1 < dim_ ? dense_[j + 1] : 0.0};
    }
    const auto* e = find_pair(i);
    return e == nullptr ? Vec2{} : e->second;
  }

  void set_pair(std::size_t i, const Vec2& value) {
    check_pair(i);
    if (!::sgdlab::all_finite(value)) throw InvalidArgument("VecD::set_pair: non-finite value");
    if (!sparse_) {
      const std::size_t j = 2 * (i - 1);
      dense_[j] = value.x;
      if (j + 1 < dim_) {
        dense_[j + 1] = value.y;
      } else if (value.y != 0.0) {
        throw InvalidArgument("VecD::set_pair: second slot lies beyond the dimension");
      }
      return;
    }
    if (2 * i > dim_ && value.y != 0.0) {
      throw InvalidArgument("VecD::set_pair: second slot lies beyond the dimension");
    }
    auto it = lower_bound(i);
    const bool present = it != pairs_.end() && it->first == i;
    const bool zero = value.x == 0.0 && value.y == 0.0;
    if (present) {
      if (zero) {
        pairs_.erase(it);
      } else {
        it->second = value;
      }
    } else if (!zero) {
      pairs_.insert(it, PairEntry{i, value});
    }
  }

  double squared_norm() const {
    double s = 0.0;
    if (!sparse_) {
      for (double c : dense_) s += c * c;
    } else {
      for (const auto& [i, p] : pairs_) s += sgdlab::squared_norm(p);
    }
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  bool all_finite() const {
    if (!sparse_) {
      return std::all_of(dense_.begin(), dense_.end(), [](double c) { return std::isfinite(c); });
    }
    return std::all_of(pairs_.begin(), pairs_.end(),
                       [](const PairEntry& e) { return sgdlab::all_finite(e.second); });
  }

  void scale(double s) {
    if (!sparse_) {
      for (double& c : dense_) c *= s;
      return;
    }
    for (auto& e : pairs_) e.second *= s;
    drop_zero_pairs();
  }

  /// this += a * x. Dimensions must agree; storage kinds may differ.
  void axpy(double a, const VecD& x) {
    if (x.dim_ != dim_) throw InvalidArgument("VecD::axpy: dimension mismatch");
    if (!sparse_) {
      if (!x.sparse_) {
        for (std::size_t j = 0; j < dim_; ++j) dense_[j] += a * x.dense_[j];
      } else {
        for (const auto& [i, p] : x.pairs_) {
          const std::size_t j = 2 * (i - 1);
          dense_[j] += a * p.x;
          if (j + 1 < dim_) dense_[j + 1] += a * p.y;
        }
      }
      return;
    }
    if (!x.sparse_) {
      for (std::size_t i = 1; i <= x.num_pairs(); ++i) {
        const Vec2 xp = x.pair(i);
        if (xp.x == 0.0 && xp.y == 0.0) continue;
        Vec2 p = pair(i);
        sgdlab::axpy(p, a, xp);
        set_pair(i, p);
      }
      return;
    }
    // Sorted merge of the two pair lists.
    std::vector<PairEntry> out;
    out.reserve(pairs_.size() + x.pairs_.size());
    auto it = pairs_.begin();
    auto jt = x.pairs_.begin();
    while (it != pairs_.end() || jt != x.pairs_.end()) {
      if (jt == x.pairs_.end() || (it != pairs_.end() && it->first < jt->first)) {
        out.push_back(*it++);
      } else if (it == pairs_.end() || jt->first < it->first) {
        Vec2 p{};
        sgdlab::axpy(p, a, jt->second);
        if (p.x != 0.0 || p.y != 0.0) out.emplace_back(jt->first, p);
        ++jt;
      } else {
        Vec2 p = it->second;
        sgdlab::axpy(p, a, jt->second);
        if (p.x != 0.0 || p.y != 0.0) out.emplace_back(it->first, p);
        ++it;
        ++jt;
      }
    }
    pairs_ = std::move(out);
  }

  /// Nonzero pairs in increasing index order (all pairs for dense storage).
  template <class F>
  void for_each_pair(F&& f) const {
    if (!sparse_) {
      for (std::size_t i = 1; i <= num_pairs(); ++i) f(i, pair(i));
    } else {
      for (const auto& [i, p] : pairs_) f(i, p);
    }
  }

  std::size_t nonzero_pairs() const {
    if (sparse_) return pairs_.size();
    std::size_t n = 0;
    for_each_pair([&](std::size_t, const Vec2& p) { n += (p.x != 0.0 || p.y != 0.0); });
    return n;
  }

  VecD to_dense() const {
    VecD v = zeros(dim_, false);
    for_each_pair([&](std::size_t i, const Vec2& p) { v.set_pair(i, p); });
    return v;
  }

  VecD to_sparse() const {
    VecD v = zeros(dim_, true);
    for_each_pair([&](std::size_t i, const Vec2& p) { v.set_pair(i, p); });
    return v;
  }

  std::vector<double> coords() const {
    std::vector<double> out(dim_, 0.0);
    for_each_pair([&](std::size_t i, const Vec2& p) {
      const std::size_t j = 2 * (i - 1);
      out[j] = p.x;
      if (j + 1 < dim_) out[j + 1] = p.y;
    });
    return out;
  }

  /// Equal as points in R^d regardless of storage kind; `tol` is per coordinate.
  friend bool canonical_equal(const VecD& u, const VecD& v, double tol = 0.0) {
    if (u.dim_ != v.dim_) return false;
    if (!u.sparse_ && !v.sparse_) {
      for (std::size_t j = 0; j < u.dim_; ++j) {
        if (std::abs(u.dense_[j] - v.dense_[j]) > tol) return false;
      }
      return true;
    }
    VecD diff = u.to_sparse();
    diff.axpy(-1.0, v);
    bool ok = true;
    diff.for_each_pair([&](std::size_t, const Vec2& p) {
      ok = ok && std::abs(p.x) <= tol && std::abs(p.y) <= tol;
    });
    return ok;
  }

 private:
  void check_coord(std::size_t j) const {
    if (j >= dim_) throw InvalidArgument("VecD: coordinate index out of range");
  }
  void check_pair(std::size_t i) const {
    if (i < 1 || i > num_pairs()) throw InvalidArgument("VecD: pair index out of range");
  }
  std::vector<PairEntry>::iterator lower_bound(std::size_t i) {
    return std::lower_bound(pairs_.begin(), pairs_.end(), i,
                            [](const PairEntry& e, std::size_t k) { return e.first < k; });
  }
  const PairEntry* find_pair(std::size_t i) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), i,
                               [](const PairEntry& e, std::size_t k) { return e.first < k; });
    return (it != pairs_.end() && it->first == i) ? &*it : nullptr;
  }
  void drop_zero_pairs() {
    std::erase_if(pairs_, [](const PairEntry& e) { return e.second.x == 0.0 && e.second.y == 0.0; });
  }

  std::size_t dim_ = 0;
  bool sparse_ = false;
  std::vector<double> dense_;
  std::vector<PairEntry> pairs_;
};

inline double squared_norm(const VecD& v) { return v.squared_norm(); }
inline double norm(const VecD& v) { return v.norm(); }
inline bool all_finite(const VecD& v) { return v.all_finite(); }
inline void axpy(VecD& y, double a, const VecD& x) { y.axpy(a, x); }
inline VecD scaled(VecD v, double s) {
  v.scale(s);
  return v;
}

inline std::string to_string(const VecD& v) {
  std::ostringstream os;
  os.precision(17);
  os << "VecD(dim=" << v.dim() << (v.is_sparse() ? ", sparse" : "") << ") {";
  bool first = true;
  v.for_each_pair([&](std::size_t i, const Vec2& p) {
    if (p.x == 0.0 && p.y == 0.0) return;
    os << (first ? "" : ", ") << i << ": " << to_string(p);
    first = false;
  });
  os << "}";
  return os.str();
}

inline Vec2 pair_view(const VecD& w, std::size_t i) { return w.pair(i); }

inline VecD pair_write(VecD w, std::size_t i, const Vec2& value) {
  w.set_pair(i, value);
  return w;
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// Euclidean projection onto the closed ball of the given radius.
template <class P>
P project_ball(P w, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("project_ball: radius must be positive");
  if (!all_finite(w)) throw InvalidArgument("project_ball: non-finite input");
  const double n2 = squared_norm(w);
  if (n2 <= radius * radius) return w;
  return scaled(std::move(w), radius / std::sqrt(n2));
}

/// argmin over {(a, theta2) : 0 <= a <= theta1} of (w - v)^T metric (w - v).
inline Vec2 project_segment_metric(const Vec2& w, double theta1, double theta2,
                                   const Metric2& metric) {
  if (!(theta1 >= 0.0)) throw InvalidArgument("project_segment_metric: theta1 must be >= 0");
  if (!all_finite(w) || !std::isfinite(theta2)) {
    throw InvalidArgument("project_segment_metric: non-finite input");
  }
  // Stationarity of the 1-D quadratic in a: a (w1 - a) + b (w2 - theta2) = 0.
  const double alpha = w.x + (metric.b() / metric.a()) * (w.y - theta2);
  return {std::clamp(alpha, 0.0, theta1), theta2};
}

/// Euclidean projection onto the segment [a, b].
inline Vec2 project_segment(const Vec2& w, const Vec2& a, const Vec2& b) {
  const Vec2 dir = b - a;
  const double len2 = squared_norm(dir);
  if (len2 == 0.0) return a;
  const double s = std::clamp(dot(w - a, dir) / len2, 0.0, 1.0);
  return a + s * dir;
}

}  // namespace sgdlab
