#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/optimizers.hpp"
#include "sgdlab/regularizers.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/stats.hpp"

namespace sgdlab {

inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Coupled samples
// ---------------------------------------------------------------------------

/// Position (t, l): sample step t (1-based) and slot l (0-based) inside the draw.
using Position = std::pair<std::size_t, std::size_t>;

struct CoupledSample {
  std::size_t T = 0;
  double cutoff = 0.5;  // good positions need t < cutoff * T
  std::vector<ProductInstance> S;
  std::vector<ProductInstance> S_prime;
  std::vector<Position> good;  // sorted by (t, l)
};

/// Flips the signs of `sample` at the given positions.
inline std::vector<ProductInstance> flip_at(std::vector<ProductInstance> sample,
                                            const std::vector<Position>& positions) {
  for (const auto& [t, l] : positions) {
    if (t < 1 || t > sample.size() || l >= sample[t - 1].entries.size()) {
      throw InvalidArgument("flip_at: position out of range");
    }
    sample[t - 1].entries[l].second = -sample[t - 1].entries[l].second;
  }
  return sample;
}

/// Positions whose pair index occurs exactly once in the sample and whose step is early.
inline std::vector<Position> good_positions(const std::vector<ProductInstance>& S, double cutoff = 0.5) {
  std::unordered_map<std::size_t, std::size_t> count;
  for (const auto& z : S) {
    for (const auto& e : z.entries) ++count[e.first];
  }
  const double limit = cutoff * static_cast<double>(S.size());
  std::vector<Position> good;
  for (std::size_t t = 1; t <= S.size(); ++t) {
    if (!(static_cast<double>(t) < limit)) break;
    for (std::size_t l = 0; l < S[t - 1].entries.size(); ++l) {
      if (count[S[t - 1].entries[l].first] == 1) good.emplace_back(t, l);
    }
  }
  return good;
}

inline CoupledSample draw_coupled(std::size_t T, const ProductDistribution& dist, std::uint64_t seed,
                                  double cutoff = 0.5) {
  if (T < 2) throw InvalidArgument("draw_coupled: T must be >= 2");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw InvalidArgument("draw_coupled: cutoff must lie in (0, 1]");
  CoupledSample cs;
  cs.T = T;
  cs.cutoff = cutoff;
  cs.S = draw_sample(dist, T, seed);
  cs.good = good_positions(cs.S, cutoff);
  cs.S_prime = flip_at(cs.S, cs.good);
  return cs;
}

template <class Dist>
double empirical_risk(const Dist& dist, const std::vector<typename Dist::instance_type>& sample,
                      const typename Dist::point_type& w) {
  double s = 0.0;
  for (const auto& z : sample) s += dist.value(z, w);
  return s / static_cast<double>(sample.size());
}

inline double squared_distance(const VecD& a, const VecD& b) {
  VecD d = a;
  d.axpy(-1.0, b);
  return d.squared_norm();
}

/// Every good pair of the averaged output equals -((T - t)/(k T)) eta grad f(0; z_t), to 1e-12.
/// `primed` selects the flipped sample.
inline bool averaged_pair_identity_check(const Trace<VecD, ProductInstance>& tr, const CoupledSample& cs,
                                         const ProductDistribution& dist, bool primed = false) {
  const auto& sample = primed ? cs.S_prime : cs.S;
  const double T = static_cast<double>(cs.T);
  const double k = static_cast<double>(dist.k());
  const double eta = tr.config.eta;
  for (const auto& [t, l] : cs.good) {
    const auto& [idx, sign] = sample[t - 1].entries[l];
    const Vec2 expected = -((T - static_cast<double>(t)) / (k * T)) * eta * dist.hinge().grad(Vec2{}, sign);
    const Vec2 got = tr.output.pair(idx);
    if (std::abs(got.x - expected.x) > 1e-12 || std::abs(got.y - expected.y) > 1e-12) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Distribution-dependent experiment on the paired product
// ---------------------------------------------------------------------------

struct SgdrParams {
  std::size_t T = 200;
  double C = 3.0;
  double eta = 0.0;  // 0: C / sqrt(T)
  double rho = 0.0;  // 0: 1 / C
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double cutoff = 0.5;
};

struct SgdrTrial {
  std::size_t good = 0;
  double loss_gap = 0.0;      // |F_S(w_S) - F_S(w_S')|
  double sq_distance = 0.0;   // ||w_S - w_S'||^2
  std::size_t projection_events = 0;
  double max_norm = 0.0;
  bool check_a = false;
  bool check_b = false;
  bool check_c = false;       // ||.||^2 >= T eta^2 / (500 C^2)
  bool distance_claim = false;  // ||.|| > sqrt(T) eta / (22 C)
  bool identity = false;
  bool certificate_valid = false;
  double certificate_r_gap = 0.0;
};

struct SgdrReport {
  SgdrParams params;
  double c = 0.0;
  std::vector<SgdrTrial> trials;
  bool all_a = false;
  bool all_b = false;
  bool all_identity = false;
  std::size_t projection_trials = 0;
  std::uint64_t count_c = 0;
  Interval ci_c;
  std::uint64_t count_distance_claim = 0;
  MeanCI good_count;
  std::size_t valid_certificates = 0;

  bool criterion_c() const { return ci_c.lo >= 0.1; }
  bool criterion_d() const {
    return good_count.mean + good_count.half_width >= static_cast<double>(params.T) / 5.0;
  }

  nlohmann::json to_json(bool with_trials = false) const {
    nlohmann::json j{{"schema_version", kReportSchemaVersion},
                     {"experiment", "sgdr"},
                     {"params",
                      {{"T", params.T},
                       {"C", params.C},
                       {"eta", params.eta},
                       {"rho", params.rho},
                       {"c", c},
                       {"d", 10 * params.T},
                       {"trials", params.trials},
                       {"seed", params.seed},
                       {"good_cutoff", params.cutoff}}},
                     {"regime_checks",
                      {{"eta_range", "1/T^2 < eta <= C/sqrt(T)"},
                       {"C_gt_2", params.C > 2.0},
                       {"no_projection_condition", params.eta * params.eta * params.T * params.rho * params.rho <= 1.0},
                       {"freeze_condition", c <= HingePair::freeze_limit(params.eta / 2.0, params.rho)}}},
                     {"equal_empirical_loss_all_trials", all_a},
                     {"distance_lower_bound_all_trials", all_b},
                     {"pair_identity_all_trials", all_identity},
                     {"trials_with_projection", projection_trials},
                     {"distance_event_count", count_c},
                     {"distance_event_frequency", static_cast<double>(count_c) / static_cast<double>(trials.size())},
                     {"distance_event_wilson95", {ci_c.lo, ci_c.hi}},
                     {"distance_claim_frequency",
                      static_cast<double>(count_distance_claim) / static_cast<double>(trials.size())},
                     {"mean_good", good_count.mean},
                     {"mean_good_ci95", good_count.half_width},
                     {"good_target", static_cast<double>(params.T) / 5.0},
                     {"valid_midpoint_certificates", valid_certificates}};
    if (with_trials) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& t : trials) {
        arr.push_back({{"good", t.good},
                       {"loss_gap", t.loss_gap},
                       {"sq_distance", t.sq_distance},
                       {"projection_events", t.projection_events},
                       {"identity", t.identity},
                       {"certificate_r_gap", t.certificate_r_gap}});
      }
      j["trials"] = arr;
    }
    return j;
  }
};

/// Runs SGD on S and on its flipped copy S' for independent seeds. The certificate uses the
/// midpoint of the two outputs against whichever output has the larger penalty, with margin
/// (lambda/16) ||w_S - w_S'||^2.
inline SgdrReport experiment_sgdr(SgdrParams p, const Regularizer& r = sq_norm_regularizer()) {
  if (p.T < 2) throw ConfigError("sgdr: T must be >= 2");
  if (!(p.C > 2.0)) throw ConfigError("sgdr: C must exceed 2");
  const double Td = static_cast<double>(p.T);
  if (p.eta == 0.0) p.eta = p.C / std::sqrt(Td);
  if (p.rho == 0.0) p.rho = 1.0 / p.C;
  if (!(p.eta > 1.0 / (Td * Td)) || p.eta > p.C / std::sqrt(Td) * (1.0 + 1e-12)) {
    throw ConfigError("sgdr: step size must satisfy 1/T^2 < eta <= C/sqrt(T)");
  }
  if (p.trials < 1) throw ConfigError("sgdr: trials must be >= 1");
  const ProductDistribution dist = ProductDistribution::paired(p.T, p.rho);
  if (dist.hinge().c() > HingePair::freeze_limit(p.eta / 2.0, p.rho)) {
    throw ConfigError("sgdr: offset c too large for the frozen-pair argument at this step size");
  }
  const double lam = r.lambda.value_or(0.0);

  SgdrReport rep;
  rep.params = p;
  rep.c = dist.hinge().c();
  rep.trials = parallel_map(p.trials, [&](std::size_t i) {
    const CoupledSample cs = draw_coupled(p.T, dist, derive_seed(p.seed, i), p.cutoff);
    RunConfig cfg;
    cfg.eta = p.eta;
    cfg.T = p.T;
    cfg.radius = 1.0;
    cfg.store_iterates = false;
    const auto a = run_sgd_on_sample(dist, cs.S, cfg);
    const auto b = run_sgd_on_sample(dist, cs.S_prime, cfg);
    SgdrTrial tr;
    tr.good = cs.good.size();
    tr.projection_events = a.projection_events + b.projection_events;
    tr.max_norm = std::max(a.max_iterate_norm, b.max_iterate_norm);
    const double fa = empirical_risk(dist, cs.S, a.output);
    const double fb = empirical_risk(dist, cs.S, b.output);
    tr.loss_gap = std::abs(fa - fb);
    tr.sq_distance = squared_distance(a.output, b.output);
    tr.check_a = tr.loss_gap <= 1e-12 && tr.projection_events == 0;
    tr.check_b = tr.sq_distance >= static_cast<double>(tr.good) * (p.eta * p.rho) * (p.eta * p.rho) / 64.0;
    tr.check_c = tr.sq_distance >= Td * p.eta * p.eta / (500.0 * p.C * p.C);
    tr.distance_claim = std::sqrt(tr.sq_distance) > std::sqrt(Td) * p.eta / (22.0 * p.C);
    tr.identity = averaged_pair_identity_check(a, cs, dist, false) && averaged_pair_identity_check(b, cs, dist, true);

    const bool a_high = r(a.output) >= r(b.output);
    const auto& w_hi = a_high ? a.output : b.output;
    const auto& sample_hi = a_high ? cs.S : cs.S_prime;
    VecD mid = a.output;
    mid.axpy(1.0, b.output);
    mid.scale(0.5);
    const auto F = [&](const VecD& w) { return empirical_risk(dist, sample_hi, w); };
    const double margin = (lam / 16.0) * tr.sq_distance * (1.0 - 1e-9);
    const auto cert = violation_certificate(w_hi, F, r, mid, margin);
    tr.certificate_valid = cert.valid;
    tr.certificate_r_gap = cert.r_gap;
    return tr;
  });

  rep.all_a = rep.all_b = rep.all_identity = true;
  std::vector<double> goods;
  for (const auto& t : rep.trials) {
    rep.all_a = rep.all_a && t.check_a;
    rep.all_b = rep.all_b && (t.projection_events != 0 || t.check_b);
    rep.all_identity = rep.all_identity && t.identity;
    rep.projection_trials += t.projection_events != 0;
    rep.count_c += t.check_c;
    rep.count_distance_claim += t.distance_claim;
    rep.valid_certificates += t.certificate_valid;
    goods.push_back(static_cast<double>(t.good));
  }
  rep.ci_c = wilson_ci(rep.count_c, rep.trials.size());
  rep.good_count = mean_ci(goods);
  return rep;
}

// ---------------------------------------------------------------------------
// Statistical complexity
// ---------------------------------------------------------------------------

struct ComplexityReport {
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t candidates = 0;     // |K|
  std::size_t support_size = 0;   // packed support of the hard distribution
  std::size_t witness_candidates = 0;  // points of K with population excess >= 1/4
  std::uint64_t witnesses = 0;
  double probability = 0.0;
  Interval ci;
  double exact_probability = 0.0;
  double epsilon = 0.0;  // population excess guaranteed for witnesses

  nlohmann::json to_json() const {
    return {{"d", d},
            {"m", m},
            {"trials", trials},
            {"set_size", candidates},
            {"support_size", support_size},
            {"witness_candidates", witness_candidates},
            {"witness_count", witnesses},
            {"witness_probability", probability},
            {"wilson95", {ci.lo, ci.hi}},
            {"exact_probability", exact_probability},
            {"epsilon", epsilon}};
  }
};

/// Estimates P(some w in K has zero empirical excess on m draws and population excess >= 1/4).
inline ComplexityReport feldman_complexity_probe(const std::vector<CubePoint>& K, std::size_t d, std::size_t m,
                                                 std::size_t trials, std::uint64_t seed) {
  if (d > FeldmanHardDistribution::kExactMaxDim) {
    throw Unsupported("feldman probe: exact mode requires d <= 24");
  }
  if (K.empty()) throw InvalidArgument("feldman probe: empty set");
  if (trials < 1) throw InvalidArgument("feldman probe: trials must be >= 1");
  const auto dist = FeldmanHardDistribution::over_set(d, K);

  std::vector<std::vector<std::size_t>> near;  // near-support lists of witness candidates
  for (CubePoint w : K) {
    if (dist.population_excess(w) >= 0.25 - 1e-12) near.push_back(dist.near_support(w));
  }

  ComplexityReport rep;
  rep.d = d;
  rep.m = m;
  rep.trials = trials;
  rep.candidates = K.size();
  rep.support_size = dist.support().size();
  rep.witness_candidates = near.size();
  rep.epsilon = 0.25;
  const auto hits = parallel_map(trials, [&](std::size_t i) -> int {
    Rng rng(derive_seed(seed, i));
    std::vector<std::uint64_t> any((dist.support().size() + 63) / 64, 0);
    for (std::size_t j = 0; j < m; ++j) {
      const auto inst = dist.sample(rng);
      for (std::size_t q = 0; q < any.size(); ++q) any[q] |= inst.included[q];
    }
    for (const auto& lst : near) {
      const bool clear = std::none_of(lst.begin(), lst.end(),
                                      [&](std::size_t s) { return (any[s / 64] >> (s % 64)) & 1U; });
      if (clear) return 1;
    }
    return 0;
  });
  for (int h : hits) rep.witnesses += static_cast<std::uint64_t>(h);
  rep.probability = static_cast<double>(rep.witnesses) / static_cast<double>(trials);
  rep.ci = wilson_ci(rep.witnesses, trials);
  // Support points are themselves candidates with singleton near lists, and every other
  // candidate needs some support point excluded, so only the support matters.
  rep.exact_probability =
      1.0 - std::pow(1.0 - std::ldexp(1.0, -static_cast<int>(m)), static_cast<double>(rep.support_size));
  return rep;
}

inline std::vector<CubePoint> full_cube(std::size_t d) {
  if (d > FeldmanHardDistribution::kCubeScanMaxDim) throw Unsupported("full_cube: d too large to enumerate");
  std::vector<CubePoint> out(std::size_t{1} << d);
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = x;
  return out;
}

// ---------------------------------------------------------------------------
// Averaged product: flip class and cube embedding
// ---------------------------------------------------------------------------

struct NoucParams {
  std::size_t T = 8;
  double C = 3.0;
  double eta = 0.0;  // 0: C / sqrt(T)
  std::size_t k = 124;
  double rho = 0.0;  // 0: 1 / C
  double c = 0.0;    // 0: 1 / (8 k T^2)
  std::size_t dim_factor = 100000;
  std::size_t subset_samples = 256;
  std::size_t probe_trials = 1000;
  std::uint64_t seed = 1;
};

struct NoucReport {
  NoucParams params;
  std::size_t dim = 0;
  double c = 0.0;
  std::size_t good = 0;
  bool skipped = false;
  std::string diagnostic;
  double base_loss = 0.0;
  double max_loss_gap = 0.0;        // over members, both F_S and F_S'
  bool losses_equal = false;
  std::size_t members_in_W = 0;     // r(w_S') <= r(w_S)
  std::size_t distinct_images = 0;
  bool images_on_cube = false;
  double g = 0.0;                   // 24 k / (eta rho sqrt T)
  double map_lipschitz = 0.0;       // exact factor of the affine map
  double worst_ratio = 0.0;         // max ||u - u'|| / ||w - w'|| over sampled pairs
  bool lipschitz_ok = false;
  std::size_t projection_events = 0;
  ComplexityReport probe;
  bool probe_ran = false;
  bool probe_ok = false;            // probability >= 0.5 - CI
  double epsilon_original = 0.0;    // 1/(4 g)
  double epsilon_nominal = 0.0;     // 1e-4 sqrt(T) eta / C

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", kReportSchemaVersion},
                     {"experiment", "nouc"},
                     {"params",
                      {{"T", params.T},
                       {"C", params.C},
                       {"eta", params.eta},
                       {"k", params.k},
                       {"rho", params.rho},
                       {"c", c},
                       {"d", dim},
                       {"subset_samples", params.subset_samples},
                       {"probe_trials", params.probe_trials},
                       {"seed", params.seed}}},
                     {"regime_checks",
                      {{"freeze_condition", c <= HingePair::freeze_limit(params.eta / (2.0 * params.k), params.rho)},
                       {"embedding_dim_ge_4T_over_9", 9 * good >= 4 * params.T}}},
                     {"desk_scale_note",
                      "the cube probe runs on the embedded image at d = |S_g| with m = |S_g|/6"},
                     {"good", good},
                     {"skipped", skipped},
                     {"diagnostic", diagnostic},
                     {"base_loss", base_loss},
                     {"max_loss_gap", max_loss_gap},
                     {"losses_equal", losses_equal},
                     {"members_in_W", members_in_W},
                     {"distinct_images", distinct_images},
                     {"images_on_cube", images_on_cube},
                     {"g", g},
                     {"map_lipschitz", map_lipschitz},
                     {"worst_ratio", worst_ratio},
                     {"lipschitz_ok", lipschitz_ok},
                     {"projection_events", projection_events},
                     {"probe_ran", probe_ran},
                     {"probe_ok", probe_ok},
                     {"measured", {{"m", probe.m}, {"epsilon_cube", probe.epsilon}, {"epsilon", epsilon_original}}},
                     {"nominal", {{"m", 2 * params.T}, {"epsilon", epsilon_nominal}}}};
    if (probe_ran) j["probe"] = probe.to_json();
    return j;
  }
};

inline NoucReport experiment_nouc(NoucParams p, const Regularizer& r = sq_norm_regularizer()) {
  if (p.T < 2) throw ConfigError("nouc: T must be >= 2");
  if (p.T > 16) throw ConfigError("nouc: T must be <= 16 at desk scale");
  if (!(p.C > 2.0)) throw ConfigError("nouc: C must exceed 2");
  const double Td = static_cast<double>(p.T);
  if (p.eta == 0.0) p.eta = p.C / std::sqrt(Td);
  if (p.rho == 0.0) p.rho = 1.0 / p.C;
  if (!(p.eta > 1.0 / (Td * Td)) || p.eta > p.C / std::sqrt(Td) * (1.0 + 1e-12)) {
    throw ConfigError("nouc: step size must satisfy 1/T^2 < eta <= C/sqrt(T)");
  }
  if (p.subset_samples < 2) throw ConfigError("nouc: need at least 2 flip-class samples");
  const ProductDistribution dist = ProductDistribution::averaged(p.T, p.k, p.rho, p.c, p.dim_factor);
  const double kd = static_cast<double>(p.k);
  if (dist.hinge().c() > HingePair::freeze_limit(p.eta / (2.0 * kd), p.rho)) {
    throw ConfigError("nouc: offset c too large for the frozen-pair argument at this step size");
  }

  NoucReport rep;
  rep.params = p;
  rep.dim = dist.dim();
  rep.c = dist.hinge().c();
  const CoupledSample cs = draw_coupled(p.T, dist, p.seed);
  rep.good = cs.good.size();
  const std::size_t n = rep.good;
  rep.g = 24.0 * kd / (p.eta * p.rho * std::sqrt(Td));
  rep.epsilon_nominal = 1e-4 * std::sqrt(Td) * p.eta / p.C;
  if (n < 6) {
    rep.skipped = true;
    rep.diagnostic = "fewer than 6 good positions: m = |S_g|/6 < 1";
    return rep;
  }

  RunConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  cfg.radius = 1.0;
  cfg.store_iterates = false;
  const auto base = run_sgd_on_sample(dist, cs.S, cfg);
  rep.projection_events += base.projection_events;
  rep.base_loss = empirical_risk(dist, cs.S, base.output);
  const double r_base = r(base.output);

  // Affine coordinates: u_j = -(w_x(pair_j) - m_j) / (h_j sqrt n), with pair values
  // eta'_j rho v_z and eta'_j = (T - t_j) eta / (k T).
  std::vector<std::size_t> pair_of(n);
  std::vector<double> mid(n), half(n);
  const double sn = std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto [t, l] = cs.good[j];
    pair_of[j] = cs.S[t - 1].entries[l].first;
    const double eta_p = (Td - static_cast<double>(t)) * p.eta / (kd * Td);
    mid[j] = -eta_p * p.rho / 8.0;
    half[j] = eta_p * p.rho / 8.0;
    rep.map_lipschitz = std::max(rep.map_lipschitz, 1.0 / (half[j] * sn));
  }
  const auto embed = [&](const VecD& w) {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = -(w.pair(pair_of[j]).x - mid[j]) / (half[j] * sn);
    return u;
  };

  std::vector<VecD> outputs;
  std::vector<std::vector<double>> images;
  outputs.reserve(p.subset_samples);
  images.reserve(p.subset_samples);
  rep.images_on_cube = true;
  std::vector<CubePoint> cube_points;
  for (std::size_t s = 0; s < p.subset_samples; ++s) {
    Rng rng(derive_seed(p.seed ^ 0xF11Bu, s));
    std::vector<Position> flips;
    for (const auto& pos : cs.good) {
      if (rng() >> 63) flips.push_back(pos);
    }
    const auto Sp = flip_at(cs.S, flips);
    const auto tr = run_sgd_on_sample(dist, Sp, cfg);
    rep.projection_events += tr.projection_events;
    rep.max_loss_gap = std::max({rep.max_loss_gap, std::abs(empirical_risk(dist, Sp, tr.output) - rep.base_loss),
                                 std::abs(empirical_risk(dist, cs.S, tr.output) - rep.base_loss)});
    rep.members_in_W += r(tr.output) <= r_base;
    auto u = embed(tr.output);
    CubePoint cp = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(std::abs(u[j]) * sn - 1.0) > 1e-9) rep.images_on_cube = false;
      if (u[j] > 0) cp |= CubePoint{1} << j;
    }
    cube_points.push_back(cp);
    outputs.push_back(tr.output);
    images.push_back(std::move(u));
  }
  rep.losses_equal = rep.max_loss_gap <= 1e-12;

  rep.lipschitz_ok = rep.map_lipschitz <= rep.g;
  for (std::size_t a = 0; a < outputs.size(); ++a) {
    for (std::size_t b = a + 1; b < outputs.size(); ++b) {
      double du = 0.0;
      for (std::size_t j = 0; j < n; ++j) du += (images[a][j] - images[b][j]) * (images[a][j] - images[b][j]);
      du = std::sqrt(du);
      const double dw = std::sqrt(squared_distance(outputs[a], outputs[b]));
      if (dw > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, du / dw);
      if (du > rep.g * dw * (1.0 + 1e-12)) rep.lipschitz_ok = false;
    }
  }

  std::vector<CubePoint> distinct = cube_points;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  rep.distinct_images = distinct.size();
  // Keep the sampled order so the packed support does not depend on sorting.
  std::vector<CubePoint> K;
  for (CubePoint cp : cube_points) {
    if (std::find(K.begin(), K.end(), cp) == K.end()) K.push_back(cp);
  }
  rep.epsilon_original = 0.25 / rep.g;
  if (n > FeldmanHardDistribution::kExactMaxDim) {
    rep.diagnostic = "embedded dimension exceeds the exact probe limit; probe skipped";
    return rep;
  }
  rep.probe = feldman_complexity_probe(K, n, n / 6, p.probe_trials, derive_seed(p.seed, 0xFE1D));
  rep.probe_ran = true;
  rep.probe_ok = rep.probe.probability >= 0.5 - rep.probe.ci.half_width();
  return rep;
}

// ---------------------------------------------------------------------------
// Non-convex square walk
// ---------------------------------------------------------------------------

/// beta with erf(beta) = sqrt(erf(sqrt(50)/(4c))) - erf(sqrt(50)/(4c)).
inline double solve_beta(double c) {
  if (!(c > 0.0)) throw ConfigError("nonconvex: c must be positive");
  const double e = erf(std::sqrt(50.0) / (4.0 * c));
  const double rhs = std::sqrt(e) - e;
  if (!(rhs > 0.0)) {
    throw ConfigError("nonconvex: no positive beta for c = " + std::to_string(c) +
                      " (sqrt(erf(x)) - erf(x) = " + std::to_string(rhs) + ")");
  }
  return erf_inv(rhs);
}

struct NonconvexParams {
  std::size_t T = 10000;
  double c = 1.0;  // eta sqrt(T)
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  double alpha = 64.0;          // exit-time check
  std::size_t exit_trials = 0;  // 0: skip
};

struct NonconvexReport {
  NonconvexParams params;
  double eta = 0.0;
  double beta = 0.0;
  std::uint64_t not_e1 = 0;
  std::uint64_t e2 = 0;
  std::uint64_t e = 0;
  std::uint64_t equality_failures = 0;
  std::uint64_t distance_failures = 0;
  std::uint64_t midpoint_failures = 0;
  std::uint64_t violations = 0;
  BoundReport not_e1_bound;
  double claim_good_lower = 0.0;  // 1 - sqrt(erf(50/(4c)))
  BoundReport exit_bound;
  bool exit_ran = false;

  double violation_rate() const { return e == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(e); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", kReportSchemaVersion},
                     {"experiment", "nonconvex"},
                     {"params",
                      {{"T", params.T}, {"c", params.c}, {"eta", eta}, {"trials", params.trials}, {"seed", params.seed}}},
                     {"regime_checks", {{"beta_positive", beta > 0.0}, {"domain", "R^2, no projection"}}},
                     {"beta", beta},
                     {"not_E1", not_e1},
                     {"E2", e2},
                     {"E", e},
                     {"E_frequency", static_cast<double>(e) / static_cast<double>(params.trials)},
                     {"claim_good_lower", claim_good_lower},
                     {"not_E1_bound",
                      {{"analytic", not_e1_bound.analytic},
                       {"empirical", not_e1_bound.empirical},
                       {"ci", not_e1_bound.ci_half_width},
                       {"pass", not_e1_bound.pass}}},
                     {"equality_failures", equality_failures},
                     {"distance_failures", distance_failures},
                     {"midpoint_failures", midpoint_failures},
                     {"violations", violations},
                     {"violation_rate", violation_rate()}};
    if (exit_ran) {
      j["exit_time"] = {{"alpha", params.alpha},
                        {"analytic", exit_bound.analytic},
                        {"empirical", exit_bound.empirical},
                        {"ci", exit_bound.ci_half_width},
                        {"pass", exit_bound.pass}};
    }
    return j;
  }
};

struct SquareWalkRun {
  Vec2 output{};
  std::array<std::size_t, 4> counts{};  // occurrences of z = 1..4
};

/// Unprojected SGD on the square walk for one seed; same draws and arithmetic as run_sgd.
inline SquareWalkRun run_square_walk(std::size_t T, double eta, std::uint64_t seed) {
  const SquareWalkDistribution dist;
  Rng rng(seed);
  SquareWalkRun run;
  Vec2 w{};
  Vec2 sum{};
  for (std::size_t t = 0; t < T; ++t) {
    axpy(sum, 1.0, w);
    const int z = dist.sample(rng);
    ++run.counts[static_cast<std::size_t>(z - 1)];
    axpy(w, -eta, dist.grad(z, w));
  }
  run.output = scaled(sum, 1.0 / static_cast<double>(T));
  return run;
}

inline double square_walk_empirical(const SquareWalkRun& run, const Vec2& w) {
  const SquareWalkDistribution dist;
  double s = 0.0;
  std::size_t n = 0;
  for (int z = 1; z <= 4; ++z) {
    s += static_cast<double>(run.counts[static_cast<std::size_t>(z - 1)]) * dist.value(z, w);
    n += run.counts[static_cast<std::size_t>(z - 1)];
  }
  return s / static_cast<double>(n);
}

inline NonconvexReport experiment_nonconvex(NonconvexParams p, const Regularizer& r) {
  if (p.T < 1 || p.trials < 1) throw ConfigError("nonconvex: T and trials must be >= 1");
  if (!r.strictly_quasi_convex) throw ConfigError("nonconvex: regularizer must be strictly quasi-convex");
  NonconvexReport rep;
  rep.params = p;
  rep.beta = solve_beta(p.c);
  rep.eta = p.c / std::sqrt(static_cast<double>(p.T));
  const double e2_threshold = rep.eta * std::sqrt(static_cast<double>(p.T)) * rep.beta / 2.0;

  struct Outcome {
    bool not_e1 = false, e2 = false, e = false, eq_fail = false, dist_fail = false, mid_fail = false, viol = false;
  };
  const auto out = parallel_map(p.trials, [&](std::size_t i) {
    const SquareWalkRun run = run_square_walk(p.T, rep.eta, derive_seed(p.seed, i));
    const Vec2 ws = run.output;
    Outcome o;
    o.not_e1 = !(std::abs(ws.y) > 0.25);
    o.e2 = std::abs(ws.x) > e2_threshold;
    o.e = !o.not_e1 && o.e2;
    if (o.e) {
      const Vec2 w0{0.0, ws.y};
      const Vec2 wm1{-ws.x, ws.y};
      const double f = square_walk_empirical(run, ws);
      o.eq_fail = std::abs(f - square_walk_empirical(run, w0)) > 1e-12 ||
                  std::abs(f - square_walk_empirical(run, wm1)) > 1e-12;
      o.dist_fail = !(norm(ws - w0) >= e2_threshold);
      o.mid_fail = !(0.5 * ws + 0.5 * wm1 == w0);
      o.viol = r(w0) < std::max(r(ws), r(wm1));
    }
    return o;
  });
  for (const auto& o : out) {
    rep.not_e1 += o.not_e1;
    rep.e2 += o.e2;
    rep.e += o.e;
    rep.equality_failures += o.eq_fail;
    rep.distance_failures += o.dist_fail;
    rep.midpoint_failures += o.mid_fail;
    rep.violations += o.viol;
  }
  const double x = std::sqrt(50.0) / (4.0 * p.c);
  rep.not_e1_bound = BoundReport::make(erf(x) + std::sqrt(125000.0 / static_cast<double>(p.T)), rep.not_e1, p.trials);
  rep.claim_good_lower = 1.0 - std::sqrt(erf(50.0 / (4.0 * p.c)));
  if (p.exit_trials > 0) {
    rep.exit_bound = exit_time_empirical(p.alpha, p.c, p.T, p.exit_trials, derive_seed(p.seed, 0xE817));
    rep.exit_ran = true;
  }
  return rep;
}

}  // namespace sgdlab
