#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgdlab/experiments.hpp"
#include "sgdlab/report.hpp"
#include "sgdlab/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sgdlab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json", "svg"};
  std::size_t trials = 0;
};

void add_common(CLI::App* sub, Common& c, bool stochastic) {
  auto* seed = sub->add_option("--seed", c.seed, "master seed");
  if (stochastic) seed->required();
  sub->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  sub->add_option("--format", c.formats, "output formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  sub->add_option("--trials", c.trials, "number of trials (0 keeps the subcommand default)");
}

/// Writes the requested artifacts and lists each one in the manifest.
class Outputs {
 public:
  Outputs(const Common& c, std::string command) : dir_(c.out_dir), formats_(c.formats.begin(), c.formats.end()) {
    manifest_.command = std::move(command);
    manifest_.seed = c.seed;
  }

  RunManifest& manifest() { return manifest_; }

  void json_file(const std::string& name, const json& j) {
    if (formats_.count("json")) put(name + ".json", j.dump(2) + "\n");
  }
  void csv_file(const std::string& name, const std::string& text) {
    if (formats_.count("csv")) put(name + ".csv", text);
  }
  void svg_file(const std::string& name, const std::string& text) {
    if (formats_.count("svg")) put(name + ".svg", text);
  }

  void finish(double seconds) {
    manifest_.wall_clock_seconds = seconds;
    const fs::path p = dir_ / (manifest_.command + "_manifest.json");
    write_json(p, manifest_.to_json());
  }

 private:
  void put(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    write_text(p, text);
    manifest_.files.push_back(p.string());
  }

  fs::path dir_;
  std::set<std::string> formats_;
  RunManifest manifest_;
};

std::string b_tag(double b) {
  std::ostringstream os;
  os << b;
  return os.str();
}

int verdict(Outputs& out, const std::vector<std::string>& failures) {
  out.manifest().pass = failures.empty();
  if (failures.empty()) {
    std::cout << out.manifest().command << ": PASS\n";
    return kExitPass;
  }
  std::cout << out.manifest().command << ": FAIL\n";
  for (const auto& f : failures) std::cout << "  - " << f << "\n";
  return kExitFail;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct FieldArgs {
  std::vector<double> bs{0.0, 0.05, 0.1, 0.25};
  double theta = 1.0;
  std::size_t grid = 25;
};

int cmd_field(const FieldArgs& a, Outputs& out) {
  if (a.grid < 2) throw ConfigError("field: grid must be >= 2");
  json rep{{"schema_version", kReportSchemaVersion}, {"experiment", "field"}, {"theta", a.theta}, {"grid", a.grid}};
  std::vector<std::string> failures;
  for (double b : a.bs) {
    const SegmentQuadratic obj(b, a.theta);
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,y,neg_grad_x,neg_grad_y\n";
    SvgPlot plot;
    plot.title = "negative gradient field, b = " + b_tag(b);
    const double step = 2.4 / static_cast<double>(a.grid - 1);
    std::vector<std::pair<Vec2, Vec2>> raw;
    double gmax = 0.0;
    for (std::size_t i = 0; i < a.grid; ++i) {
      for (std::size_t j = 0; j < a.grid; ++j) {
        const Vec2 w{-1.2 + step * static_cast<double>(i), -1.2 + step * static_cast<double>(j)};
        const Vec2 g = -1.0 * obj.grad(w);
        csv << w.x << ',' << w.y << ',' << g.x << ',' << g.y << '\n';
        raw.emplace_back(w, g);
        gmax = std::max(gmax, norm(g));
      }
    }
    for (const auto& [w, g] : raw) {
      const double len = gmax > 0 ? 0.45 * step * norm(g) / gmax : 0.0;
      const double n = norm(g);
      plot.arrows.emplace_back(w, n > 0 ? w + (len / n) * g : w);
    }
    plot.lines.push_back({"A", "#d62728", {{0.0, a.theta}, {b, a.theta}}});
    const Vec2 probe{0.0, 0.5};
    const Vec2 g_probe = obj.grad(probe);
    const Vec2 expected = Metric2::canonical().apply(probe - obj.nearest(probe));
    if (b == 0.0 && norm(g_probe - expected) > 1e-12) failures.push_back("gradient at (0, 0.5) mismatch for b = 0");
    rep["runs"].push_back({{"b", b}, {"rows", a.grid * a.grid}, {"grad_at_0_0.5", {g_probe.x, g_probe.y}}});
    out.csv_file("field_b" + b_tag(b), csv.str());
    out.svg_file("field_b" + b_tag(b), plot.render());
  }
  out.json_file("field", rep);
  return verdict(out, failures);
}

struct TrajectoryArgs {
  std::vector<double> bs{0.0, 0.05, 0.1, 0.25};
  double theta = 1.0;
  double eta = 0.2;
  std::size_t T = 10000;
};

int cmd_trajectory(const TrajectoryArgs& a, Outputs& out) {
  for (double b : a.bs) detail::check_regime(b, a.theta, a.eta);
  if (a.T < 1) throw ConfigError("trajectory: T must be >= 1");
  json rep{{"schema_version", kReportSchemaVersion},
           {"experiment", "trajectory"},
           {"theta", a.theta},
           {"eta", a.eta},
           {"T", a.T},
           {"regime_checks", {{"eta_below_one_third", a.eta < 1.0 / 3.0}}}};
  std::vector<std::string> failures;
  std::vector<std::pair<double, double>> finals;
  for (double b : a.bs) {
    const PhaseTimes ph = detect_phases(b, a.theta, a.eta);
    RunConfig cfg;
    cfg.eta = a.eta;
    cfg.T = a.T;
    const auto tr = run_gd(SegmentQuadratic(b, a.theta), cfg);
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,w1,w2,oracle_w1,oracle_w2\n";
    double gap = 0.0;
    Polyline sim{"GD", "#1f77b4", {}}, oracle{"closed form", "#ff7f0e", {}};
    for (std::size_t t = 1; t <= a.T; ++t) {
      const Vec2& w = tr.iterates[t - 1];
      const Vec2 o = closed_form_iterate(t, ph);
      gap = std::max(gap, norm(w - o));
      csv << t << ',' << w.x << ',' << w.y << ',' << o.x << ',' << o.y << '\n';
      if (t <= 200 || t % 50 == 0) {
        sim.points.push_back(w);
        oracle.points.push_back(o);
      }
    }
    SvgPlot plot;
    plot.title = "GD trajectory, eta = " + b_tag(a.eta) + ", b = " + b_tag(b);
    plot.lines = {sim, oracle};
    plot.markers.emplace_back(ph.w_t0, "t0");
    if (ph.has_t1()) plot.markers.emplace_back(ph.w_t1, "t1");
    plot.markers.emplace_back(Vec2{b, a.theta}, "(b, theta)");
    plot.markers.emplace_back(tr.output, "average");
    out.csv_file("trajectory_b" + b_tag(b), csv.str());
    out.svg_file("trajectory_b" + b_tag(b), plot.render());

    std::cout << "b = " << b << ": sim-vs-oracle max gap " << gap << ", averaged w = (" << tr.output.x << ", "
              << tr.output.y << ")\n";
    if (gap > 1e-9) failures.push_back("sim-vs-oracle gap above 1e-9 at b = " + b_tag(b));
    rep["runs"].push_back({{"b", b},
                           {"t0", ph.t0},
                           {"t1", ph.has_t1() ? json(ph.t1) : json(nullptr)},
                           {"max_gap", gap},
                           {"averaged", {tr.output.x, tr.output.y}},
                           {"final_iterate", {tr.final_iterate.x, tr.final_iterate.y}}});
    finals.emplace_back(b, tr.output.x);
    if (b == 0.0) {
      const double d = norm(tr.output - Vec2{0.0, a.theta});
      rep["b0_limit_distance"] = d;
      if (d > 1e-3) failures.push_back("b = 0 average is farther than 1e-3 from (0, theta)");
    }
  }
  std::sort(finals.begin(), finals.end());
  bool increasing = true;
  for (std::size_t i = 1; i < finals.size(); ++i) {
    if (finals[i - 1].first > 0.0 && !(finals[i].second > finals[i - 1].second)) increasing = false;
  }
  rep["averaged_w1_increasing_for_positive_b"] = increasing;
  if (!increasing) failures.push_back("averaged w1 not strictly increasing in b");
  out.json_file("trajectory", rep);
  return verdict(out, failures);
}

Regularizer regularizer_from(const std::string& name, double lambda_override) {
  Regularizer r = make_regularizer(name);
  if (lambda_override > 0.0) r.lambda = lambda_override;
  return r;
}

struct WarmupArgs {
  std::string regularizer = "sq-norm";
  double lambda = 0.0;
  double eta = 0.5;
  std::size_t T = 100000;
};

int cmd_warmup(const WarmupArgs& a, Outputs& out) {
  const Regularizer r = regularizer_from(a.regularizer, a.lambda);
  const WarmupResult res = run_warmup(r, a.eta, a.T);
  json rep{{"schema_version", kReportSchemaVersion},
           {"experiment", "warmup"},
           {"regime_checks",
            {{"eta_in_0_1", a.eta > 0 && a.eta < 1}, {"lambda_positive", r.lambda.value_or(0.0) > 0.0}}},
           {"case", res.construction.case_id},
           {"w_star", {res.construction.w_star.x, res.construction.w_star.y}},
           {"w_S", {res.w_S.x, res.w_S.y}},
           {"predicted_gap", res.construction.predicted_gap},
           {"projection_events", res.projection_events},
           {"certificate", res.certificate.to_json()}};
  out.json_file("warmup", rep);
  std::cout << "certificate: F_gap " << res.certificate.F_gap << ", r_gap " << res.certificate.r_gap << "\n";
  std::vector<std::string> failures;
  if (!res.certificate.valid) failures.push_back("no valid violation certificate");
  return verdict(out, failures);
}

struct GdrArgs {
  std::string regularizer = "l1-normalized";
  double resolution = 1e-3;
  double eta = 0.5;
};

int cmd_gdr(const GdrArgs& a, Outputs& out) {
  const Regularizer r = regularizer_from(a.regularizer, 0.0);
  const GdrResult res = run_gdr(r, a.resolution, a.eta);
  json rep{{"schema_version", kReportSchemaVersion},
           {"experiment", "gdr"},
           {"regime_checks",
            {{"eta_in_0_1", a.eta > 0 && a.eta < 1},
             {"delta_below_0.005", std::abs(res.construction.pair.delta) < 0.005 * norm(res.construction.pair.w1)},
             {"T_r_capped", res.construction.capped}}},
           {"w_S", {res.w_S.x, res.w_S.y}},
           {"certificate", res.certificate.to_json()}};
  out.json_file("gdr", rep);
  std::cout << "certificate: F_gap " << res.certificate.F_gap << ", r_gap " << res.certificate.r_gap << ", margin "
            << res.certificate.margin << "\n";
  std::vector<std::string> failures;
  if (!res.certificate.valid) failures.push_back("certificate r_gap does not exceed c_r");
  return verdict(out, failures);
}

int cmd_sgdr(SgdrParams p, const std::string& regularizer, Outputs& out) {
  const SgdrReport rep = experiment_sgdr(p, make_regularizer(regularizer));
  out.json_file("sgdr", rep.to_json());
  std::ostringstream csv;
  csv.precision(17);
  csv << "trial,good,loss_gap,sq_distance,projection_events,identity,certificate_valid,certificate_r_gap\n";
  for (std::size_t i = 0; i < rep.trials.size(); ++i) {
    const auto& t = rep.trials[i];
    csv << i << ',' << t.good << ',' << t.loss_gap << ',' << t.sq_distance << ',' << t.projection_events << ','
        << t.identity << ',' << t.certificate_valid << ',' << t.certificate_r_gap << '\n';
  }
  out.csv_file("sgdr_trials", csv.str());
  std::vector<std::string> failures;
  if (!rep.all_a) failures.push_back("(a) empirical losses differ or a projection occurred");
  if (!rep.all_b) failures.push_back("(b) distance below |S_g|(eta rho)^2/64");
  if (!rep.criterion_c()) failures.push_back("(c) distance event Wilson lower bound below 0.1");
  if (!rep.criterion_d()) failures.push_back("(d) mean |S_g| below T/5");
  if (!rep.all_identity) failures.push_back("averaged pair identity failed");
  std::cout << "mean |S_g| " << rep.good_count.mean << ", distance event frequency "
            << static_cast<double>(rep.count_c) / static_cast<double>(rep.trials.size()) << "\n";
  return verdict(out, failures);
}

int cmd_nouc(const NoucParams& p, Outputs& out) {
  const NoucReport rep = experiment_nouc(p);
  out.json_file("nouc", rep.to_json());
  std::vector<std::string> failures;
  if (rep.skipped) {
    std::cout << "probe skipped: " << rep.diagnostic << "\n";
  } else {
    if (!rep.losses_equal) failures.push_back("flip-class empirical losses differ");
    if (!rep.images_on_cube) failures.push_back("embedded points leave the scaled cube");
    if (!rep.lipschitz_ok) failures.push_back("embedding exceeds the Lipschitz factor g");
    if (rep.probe_ran && !rep.probe_ok) failures.push_back("witness probability below 0.5 - CI");
    if (!rep.diagnostic.empty()) std::cout << rep.diagnostic << "\n";
  }
  std::cout << "|S_g| = " << rep.good << ", g = " << rep.g << "\n";
  return verdict(out, failures);
}

int cmd_nonconvex(const NonconvexParams& p, const std::string& regularizer, Outputs& out) {
  const NonconvexReport rep = experiment_nonconvex(p, make_regularizer(regularizer));
  json j = rep.to_json();
  j["regularizer"] = regularizer;
  out.json_file("nonconvex", j);
  std::vector<std::string> failures;
  if (!rep.not_e1_bound.pass) failures.push_back("P(not E1) exceeds its bound");
  if (rep.equality_failures) failures.push_back("three-point empirical loss equality failed");
  if (rep.distance_failures) failures.push_back("distance to w*_0 below eta sqrt(T) beta / 2");
  if (rep.midpoint_failures) failures.push_back("midpoint identity failed");
  if (rep.e > 0 && rep.violation_rate() < 0.99) failures.push_back("violation rate below 0.99");
  if (rep.exit_ran && !rep.exit_bound.pass) failures.push_back("exit-time frequency exceeds its bound");
  std::cout << "E frequency " << static_cast<double>(rep.e) / static_cast<double>(p.trials) << ", violation rate "
            << rep.violation_rate() << "\n";
  return verdict(out, failures);
}

struct BeArgs {
  std::vector<double> as{0.1, 0.5, 1.0, std::sqrt(50.0) / 4.0};
  std::vector<std::size_t> ks{1, 2, 4};
  std::vector<double> cs{0.5, 1.0, 2.0};
  std::size_t T = 10000;
  std::size_t trials = 100000;
};

int cmd_becheck(const BeArgs& a, std::uint64_t seed, Outputs& out) {
  for (std::size_t k : a.ks) {
    if (k < 1 || a.T <= 2 * k) throw ConfigError("becheck: requires k >= 1 and T > 2k");
  }
  for (double c : a.cs) {
    if (!(c > 0)) throw ConfigError("becheck: c must be positive");
  }
  for (double x : a.as) {
    if (!(x >= 0)) throw ConfigError("becheck: a must be >= 0");
  }
  const auto rows = be_grid_check(a.as, a.ks, a.cs, a.T, a.trials, seed);
  json rep{{"schema_version", kReportSchemaVersion}, {"experiment", "becheck"}, {"T", a.T}, {"trials", a.trials}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "c,k,a,analytic,empirical,ci,pass\n";
  std::vector<std::string> failures;
  for (const auto& r : rows) {
    rep["rows"].push_back({{"c", r.c},
                           {"k", r.k},
                           {"a", r.a},
                           {"analytic", r.report.analytic},
                           {"empirical", r.report.empirical},
                           {"ci", r.report.ci_half_width},
                           {"vacuous", r.report.analytic >= 1.0},
                           {"pass", r.report.pass}});
    csv << r.c << ',' << r.k << ',' << r.a << ',' << r.report.analytic << ',' << r.report.empirical << ','
        << r.report.ci_half_width << ',' << r.report.pass << '\n';
    if (!r.report.pass) {
      failures.push_back("bound exceeded at c = " + b_tag(r.c) + ", k = " + std::to_string(r.k) + ", a = " + b_tag(r.a));
    }
  }
  out.json_file("becheck", rep);
  out.csv_file("becheck", csv.str());
  return verdict(out, failures);
}

struct FeldmanArgs {
  std::size_t d = 12;
  std::size_t m = 2;
  std::size_t trials = 10000;
};

int cmd_feldman(const FeldmanArgs& a, std::uint64_t seed, Outputs& out) {
  if (a.d < 1 || a.d > FeldmanHardDistribution::kCubeScanMaxDim) throw ConfigError("feldman: d must lie in [1, 20]");
  const ComplexityReport rep = feldman_complexity_probe(full_cube(a.d), a.d, a.m, a.trials, seed);
  json j = rep.to_json();
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = "feldman";
  out.json_file("feldman", j);
  std::vector<std::string> failures;
  if (rep.probability < 0.5 - 3.0 * rep.ci.half_width()) failures.push_back("witness probability below 0.5 - 3 CI");
  if (std::abs(rep.probability - rep.exact_probability) > 0.01) failures.push_back("exact and Monte Carlo disagree");
  std::cout << "witness probability " << rep.probability << " (exact " << rep.exact_probability << ")\n";
  return verdict(out, failures);
}

// ---------------------------------------------------------------------------
// Config files: flat key/value tables, TOML or JSON, applied to the chosen subcommand.
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::vector<std::string>>> read_config(const std::string& path) {
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  if (fs::path(path).extension() == ".json") {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      std::vector<std::string> vals;
      auto str = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array()) {
        for (const auto& v : value) vals.push_back(str(v));
      } else {
        vals.push_back(str(value));
      }
      items.emplace_back(key, vals);
    }
  } else {
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
      if (item.name == "++" || item.name == "--") continue;
      items.emplace_back(item.name, item.inputs);
    }
  }
  return items;
}

/// Inserts config-derived flags after the subcommand unless the flag is given explicitly.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  for (const auto& [key, vals] : read_config(path)) {
    const std::string flag = "--" + key;
    const bool explicit_flag = std::any_of(rest.begin(), rest.end(), [&](const std::string& s) {
      return s == flag || s.rfind(flag + "=", 0) == 0;
    });
    if (explicit_flag) continue;
    out.push_back(flag);
    for (const auto& v : vals) out.push_back(v);
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgdlab: implicit-regularization counterexamples for SGD and GD"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  FieldArgs field;
  TrajectoryArgs traj;
  WarmupArgs warm;
  GdrArgs gdr;
  SgdrParams sgdr;
  std::string sgdr_reg = "sq-norm";
  NoucParams nouc;
  NonconvexParams ncvx;
  std::string ncvx_reg = "shifted-sq-norm:0.3,0";
  BeArgs be;
  FeldmanArgs feld;

  auto* s_field = app.add_subcommand("field", "gradient field of the segment objective");
  add_common(s_field, common, false);
  s_field->add_option("--b", field.bs, "segment lengths")->delimiter(',')->capture_default_str();
  s_field->add_option("--theta", field.theta)->capture_default_str();
  s_field->add_option("--grid", field.grid)->capture_default_str();

  auto* s_traj = app.add_subcommand("trajectory", "GD path against the closed form");
  add_common(s_traj, common, false);
  s_traj->add_option("--b", traj.bs)->delimiter(',')->capture_default_str();
  s_traj->add_option("--theta", traj.theta)->capture_default_str();
  s_traj->add_option("--eta", traj.eta)->capture_default_str();
  s_traj->add_option("--T", traj.T)->capture_default_str();

  auto* s_warm = app.add_subcommand("warmup", "strongly convex regularizer counterexample for GD");
  add_common(s_warm, common, false);
  s_warm->add_option("--regularizer", warm.regularizer)->capture_default_str();
  s_warm->add_option("--lambda", warm.lambda, "override the declared modulus");
  s_warm->add_option("--eta", warm.eta)->capture_default_str();
  s_warm->add_option("--T", warm.T)->capture_default_str();

  auto* s_gdr = app.add_subcommand("gdr", "admissible regularizer counterexample for GD");
  add_common(s_gdr, common, false);
  s_gdr->add_option("--regularizer", gdr.regularizer)->capture_default_str();
  s_gdr->add_option("--resolution", gdr.resolution)->capture_default_str();
  s_gdr->add_option("--eta", gdr.eta)->capture_default_str();

  auto* s_sgdr = app.add_subcommand("sgdr", "coupled-sample SGD experiment");
  add_common(s_sgdr, common, true);
  s_sgdr->add_option("--T", sgdr.T)->capture_default_str();
  s_sgdr->add_option("--C", sgdr.C)->capture_default_str();
  s_sgdr->add_option("--eta", sgdr.eta, "default C/sqrt(T)");
  s_sgdr->add_option("--cutoff", sgdr.cutoff, "good positions need t < cutoff T")->capture_default_str();
  s_sgdr->add_option("--regularizer", sgdr_reg)->capture_default_str();

  auto* s_nouc = app.add_subcommand("nouc", "flip-class embedding and complexity probe");
  add_common(s_nouc, common, true);
  s_nouc->add_option("--T", nouc.T)->capture_default_str();
  s_nouc->add_option("--C", nouc.C)->capture_default_str();
  s_nouc->add_option("--eta", nouc.eta, "default C/sqrt(T)");
  s_nouc->add_option("--k", nouc.k)->capture_default_str();
  s_nouc->add_option("--c", nouc.c, "hinge offset, default 1/(8 k T^2)");
  s_nouc->add_option("--dim-factor", nouc.dim_factor)->capture_default_str();
  s_nouc->add_option("--subset-samples", nouc.subset_samples)->capture_default_str();

  auto* s_ncvx = app.add_subcommand("nonconvex", "square-walk experiment");
  add_common(s_ncvx, common, true);
  s_ncvx->add_option("--T", ncvx.T)->capture_default_str();
  s_ncvx->add_option("--c", ncvx.c, "eta sqrt(T)")->capture_default_str();
  s_ncvx->add_option("--regularizer", ncvx_reg)->capture_default_str();
  s_ncvx->add_option("--alpha", ncvx.alpha)->capture_default_str();
  s_ncvx->add_option("--exit-trials", ncvx.exit_trials)->capture_default_str();

  auto* s_be = app.add_subcommand("becheck", "Berry-Esseen bound checks");
  add_common(s_be, common, true);
  s_be->add_option("--a", be.as)->delimiter(',');
  s_be->add_option("--k", be.ks)->delimiter(',');
  s_be->add_option("--c", be.cs)->delimiter(',');
  s_be->add_option("--T", be.T)->capture_default_str();

  auto* s_feld = app.add_subcommand("feldman", "statistical-complexity probe on the cube");
  add_common(s_feld, common, true);
  s_feld->add_option("--d", feld.d)->capture_default_str();
  s_feld->add_option("--m", feld.m)->capture_default_str();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto start = std::chrono::steady_clock::now();
  Outputs out(common, sub->get_name());
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    const auto res = opt->results();
    cfg[opt->get_name().substr(2)] = res.size() == 1 ? json(res.front()) : json(res);
  }
  out.manifest().config = cfg;

  int code = kExitPass;
  try {
    const std::string name = sub->get_name();
    if (name == "field") {
      code = cmd_field(field, out);
    } else if (name == "trajectory") {
      code = cmd_trajectory(traj, out);
    } else if (name == "warmup") {
      code = cmd_warmup(warm, out);
    } else if (name == "gdr") {
      code = cmd_gdr(gdr, out);
    } else if (name == "sgdr") {
      sgdr.seed = common.seed;
      if (common.trials) sgdr.trials = common.trials;
      code = cmd_sgdr(sgdr, sgdr_reg, out);
    } else if (name == "nouc") {
      nouc.seed = common.seed;
      if (common.trials) nouc.probe_trials = common.trials;
      code = cmd_nouc(nouc, out);
    } else if (name == "nonconvex") {
      ncvx.seed = common.seed;
      if (common.trials) ncvx.trials = common.trials;
      code = cmd_nonconvex(ncvx, ncvx_reg, out);
    } else if (name == "becheck") {
      if (common.trials) be.trials = common.trials;
      code = cmd_becheck(be, common.seed, out);
    } else if (name == "feldman") {
      if (common.trials) feld.trials = common.trials;
      code = cmd_feldman(feld, common.seed, out);
    }
    out.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitFail;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return code;
}
