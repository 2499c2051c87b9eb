#include "io/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "core/compare.hpp"
#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "core/model.hpp"
#include "core/search.hpp"
#include "core/utility.hpp"
#include "core/validation.hpp"
#include "io/stores.hpp"

namespace ogtt {

using nlohmann::json;

int effective_workers(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// ---- small shared helpers ---------------------------------------------------

std::string hex8(uint64_t h) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x",
                static_cast<unsigned>(h & 0xffffffffull));
  return std::string(buf);
}

// Stable tag for an invocation's arguments; keeps distinct invocations in
// distinct run directories so no run ever overwrites another's artifacts.
std::string args_tag(const json& args) { return hex8(fnv1a64(args.dump())); }

Design design_from_json(const json& args, const std::string& key,
                        const Design* fallback = nullptr) {
  if (!args.contains(key)) {
    if (fallback != nullptr) return *fallback;
    throw InputError("args: missing design \"" + key + "\"");
  }
  const json& v = args.at(key);
  if (v.is_string()) return Design::parse(v.get<std::string>());
  if (v.is_array()) {
    std::vector<int> minutes;
    for (const json& m : v) {
      if (!m.is_number_integer())
        throw InputError("args: design \"" + key + "\" times must be whole minutes");
      minutes.push_back(m.get<int>());
    }
    return Design::of(std::move(minutes));
  }
  throw InputError("args: design \"" + key + "\" must be \"0,30,60\" or [0,30,60]");
}

PatientParams params_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError("args: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "theta0" && key != "theta1" && key != "theta2" && key != "g0")
      throw InputError("args: unknown key \"" + key + "\" in " + where);
  }
  PatientParams p;
  p.theta0 = j.value("theta0", 0.0);
  p.theta1 = j.value("theta1", 0.0);
  p.theta2 = j.value("theta2", 0.5);
  p.g0 = j.value("g0", 80.0);
  p.validate();
  return p;
}

json params_to_json(const PatientParams& p) {
  return json{{"theta0", p.theta0},
              {"theta1", p.theta1},
              {"theta2", p.theta2},
              {"g0", p.g0}};
}

void require_arg_keys(const json& args, const std::string& command,
                      const std::set<std::string>& allowed) {
  if (args.is_null()) return;
  if (!args.is_object()) throw InputError("args: must be an object");
  for (const auto& [key, value] : args.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw InputError("args: unknown key \"" + key + "\" for " + command);
  }
}

// Measurement CSV: optional '#' comments and a header row, then
// minute,glucose records (whole minutes, values in mg/dl).
std::vector<Observation> read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("data: cannot open " + path);
  std::vector<Observation> obs;
  std::string line;
  bool first_record = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string minute_s, glucose_s;
    if (!std::getline(row, minute_s, ',') || !std::getline(row, glucose_s))
      throw InputError("data: malformed row \"" + line + "\" in " + path);
    if (first_record) {
      first_record = false;
      // Tolerate a header row.
      try {
        (void)std::stod(minute_s);
      } catch (...) {
        continue;
      }
    }
    int minute = 0;
    double glucose = 0.0;
    try {
      size_t used = 0;
      minute = std::stoi(minute_s, &used);
      if (used != minute_s.size()) throw InputError("");
      glucose = std::stod(glucose_s);
    } catch (...) {
      throw InputError("data: malformed row \"" + line + "\" in " + path);
    }
    if (minute < 0 || minute > 180)
      throw InputError("data: time " + std::to_string(minute) +
                       " min outside the 3 h horizon in " + path);
    if (!std::isfinite(glucose))
      throw InputError("data: non-finite glucose in " + path);
    obs.push_back(Observation{minute / 60.0, glucose});
  }
  if (obs.empty()) throw InputError("data: no measurements in " + path);
  return obs;
}

DesignUtilityEstimate prefix_estimate(DesignUtilityEstimate est, int n) {
  if (n > est.t1())
    throw ContractError("runner: prefix larger than the estimate");
  est.samples.resize(static_cast<size_t>(n));
  recompute_statistics(est);
  return est;
}

// A (design, arm) estimate backed by its on-disk sample store.
struct StoreBackedArm {
  DesignUtilityEstimate est;
  std::string path;
  int loaded = 0;    // replicates read from disk
  int computed = 0;  // fresh replicates this invocation
};

StoreBackedArm open_arm(const ExperimentConfig& cfg, const std::string& hash,
                        const Design& d, const std::string& arm) {
  StoreBackedArm a;
  a.path = store_path(cfg.out_dir, hash, estimate_scope(d, arm));
  if (store_exists(a.path)) {
    a.est = load_store(a.path, hash);
    if (!(a.est.design == d) || a.est.root_seed != cfg.seed ||
        a.est.t2 != cfg.t2)
      throw ContractError("store: " + a.path + " does not match this run");
    a.loaded = a.est.t1();
  }
  return a;
}

void grow_arm(const NestedMcProblem& problem, const ExperimentConfig& cfg,
              StoreBackedArm& a, const Design& d, const std::string& arm,
              int target, int workers) {
  if (a.est.samples.empty()) {
    a.est = estimate_utility(problem, d, target, cfg.t2, cfg.seed, arm, workers);
    a.computed += target;
  } else if (a.est.t1() < target) {
    const int add = target - a.est.t1();
    a.est = extend_estimate(problem, a.est, add, workers);
    a.computed += add;
  }
}

json estimate_stats_json(const DesignUtilityEstimate& e) {
  return json{{"design", e.design.csv()},
              {"scope", e.scope},
              {"t1", e.t1()},
              {"t2", e.t2},
              {"included", e.included()},
              {"excluded", e.excluded()},
              {"mean", e.mean},
              {"variance_of_mean", e.variance_of_mean},
              {"se", std::sqrt(e.variance_of_mean)}};
}

json comparison_json(const ComparisonResult& r) {
  return json{{"design_a", r.design_a.csv()}, {"design_b", r.design_b.csv()},
              {"z", r.z},                     {"alpha", r.alpha},
              {"verdict", verdict_name(r.verdict)},
              {"t1_a", r.t1_a},               {"t1_b", r.t1_b},
              {"u_a", r.u_a},                 {"u_b", r.u_b},
              {"var_a", r.var_a},             {"var_b", r.var_b}};
}

ValidationOptions validation_options(const ExperimentConfig& cfg, int workers) {
  ValidationOptions v;
  v.constants = cfg.constants;
  v.sigma = cfg.sigma;
  v.fit = cfg.inner_fit;
  v.surrogate_fit = cfg.data_fit;
  v.root_seed = cfg.seed;
  v.workers = workers;
  return v;
}

OgttProblem problem_from(const ExperimentConfig& cfg) {
  return OgttProblem(cfg.design_prior(), cfg.constants, cfg.sigma,
                     cfg.inner_fit);
}

// Run directory + summary + manifest assembly shared by every command.
struct RunOutput {
  std::string dir;  // out_dir/runs/<hash8>/<slug>
  std::map<std::string, std::string> artifacts;
  std::map<std::string, std::string> stores;
};

// Distinct configs and distinct invocations get disjoint directories, so no
// run can overwrite another's artifacts; rerunning the same invocation
// rewrites the same bytes.
std::string run_dir(const ExperimentConfig& cfg, const std::string& slug) {
  return cfg.out_dir + "/runs/" + config_hash(cfg).substr(0, 8) + "/" + slug;
}

json finish(const ExperimentConfig& cfg, const std::string& command,
            const std::string& slug, const json& summary, RunOutput& out,
            const json& run_info, const std::string& started_at) {
  const std::string hash = config_hash(cfg);

  write_text(out.dir + "/config.json", config_to_json(cfg));
  out.artifacts["config"] = out.dir + "/config.json";
  write_text(out.dir + "/summary.json", summary.dump(2) + "\n");
  out.artifacts["summary"] = out.dir + "/summary.json";

  RunManifest m;
  m.command = command;
  m.config_hash_hex = hash;
  m.code_version = kCodeVersion;
  m.started_at = started_at;
  m.finished_at = now_iso8601_utc();
  m.config_json = config_to_json(cfg);
  m.artifacts = out.artifacts;
  m.stores = out.stores;
  write_manifest(m, out.dir);
  out.artifacts["manifest"] = out.dir + "/manifest.json";

  json resp;
  resp["command"] = command;
  resp["slug"] = slug;
  resp["config_hash"] = hash;
  resp["summary"] = summary;
  resp["artifacts"] = out.artifacts;
  resp["stores"] = out.stores;
  resp["run"] = run_info;
  return resp;
}

std::vector<std::string> curve_columns() {
  return {"minute", "glucose"};
}

}  // namespace

// ---- simulate ---------------------------------------------------------------

json run_simulate(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "simulate", {"params", "design", "sigma"});
  if (!args.contains("params"))
    throw InputError("simulate: args.params is required");
  const PatientParams p = params_from_json(args.at("params"), "params");
  const Design conv = conventional_design();
  const Design d = design_from_json(args, "design", &conv);
  double sigma = cfg.sigma;
  if (args.contains("sigma")) {
    if (!args.at("sigma").is_number())
      throw InputError("simulate: sigma must be a number");
    sigma = args.at("sigma").get<double>();
    if (sigma < 0.0 || !std::isfinite(sigma))
      throw InputError("simulate: sigma must be finite and >= 0");
  }

  const std::string slug = "simulate_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);

  // Noiseless curve on the 1-minute utility grid over the 3 h horizon.
  const std::vector<double> curve = curve_on_utility_grid(p, cfg.constants);
  std::vector<std::vector<std::string>> curve_rows;
  for (int m = 0; m < kCurveGridPoints; ++m)
    curve_rows.push_back({std::to_string(m), fmt_double(curve[m])});
  const std::string hash = config_hash(cfg);
  write_csv(out.dir + "/curve.csv", hash, curve_columns(), curve_rows);
  out.artifacts["curve"] = out.dir + "/curve.csv";

  // Noisy measurements at the design times.
  const std::vector<double> ts = d.hours();
  std::vector<double> g(ts.size());
  glucose_at_sorted_times(p, cfg.constants, ts, g);
  RngStream rng(derive_seed(cfg.seed, "simulate/" + d.key(), 0, 0));
  std::vector<std::vector<std::string>> meas_rows;
  std::vector<double> measured(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    measured[i] = g[i] + sigma * rng.normal();
    meas_rows.push_back(
        {std::to_string(d.minutes[i]), fmt_double(measured[i])});
  }
  write_csv(out.dir + "/measurements.csv", hash, curve_columns(), meas_rows);
  out.artifacts["measurements"] = out.dir + "/measurements.csv";

  json summary;
  summary["params"] = params_to_json(p);
  summary["design"] = d.csv();
  summary["sigma"] = sigma;
  summary["seed"] = cfg.seed;
  json meas = json::array();
  for (size_t i = 0; i < ts.size(); ++i)
    meas.push_back(json{{"minute", d.minutes[i]}, {"glucose", measured[i]}});
  summary["measurements"] = meas;

  return finish(cfg, "simulate", slug, summary, out, json::object(), started);
}

// ---- fit --------------------------------------------------------------------

json run_fit(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "fit", {"data"});
  if (!args.contains("data") || !args.at("data").is_string())
    throw InputError("fit: args.data must be a measurements CSV path");
  const std::string data_path = args.at("data").get<std::string>();
  const std::vector<Observation> obs = read_observations_csv(data_path);

  const std::string slug = "fit_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  const std::string hash = config_hash(cfg);

  const Posterior post(obs, cfg.constants, cfg.sigma);
  RngStream rng(derive_seed(cfg.seed, "fit", 0, 0));
  const FitResult fr = fit_posterior(post, prior_mean_start(), cfg.data_fit, rng);

  // Thinned draws.
  std::vector<std::vector<std::string>> draw_rows;
  for (size_t s = 0; s < fr.draws.size(); ++s) {
    const PatientParams& q = fr.draws[s];
    draw_rows.push_back({std::to_string(s), fmt_double(q.theta0),
                         fmt_double(q.theta1), fmt_double(q.theta2),
                         fmt_double(q.g0)});
  }
  const std::vector<std::string> draw_cols = {"draw", "theta0", "theta1",
                                              "theta2", "g0"};
  write_csv(out.dir + "/draws.csv", hash, draw_cols, draw_rows);
  out.artifacts["draws"] = out.dir + "/draws.csv";

  // Posterior predictive curve quantiles on the 1-minute grid.
  std::vector<std::vector<double>> curves;
  curves.reserve(fr.draws.size());
  for (const PatientParams& q : fr.draws)
    curves.push_back(curve_on_utility_grid(q, cfg.constants));
  std::vector<std::vector<std::string>> band_rows;
  std::vector<double> at_point(fr.draws.size());
  for (int m = 0; m < kCurveGridPoints; ++m) {
    double mean = 0.0;
    for (size_t s = 0; s < curves.size(); ++s) {
      at_point[s] = curves[s][m];
      mean += curves[s][m];
    }
    mean /= static_cast<double>(curves.size());
    band_rows.push_back({std::to_string(m), fmt_double(mean),
                         fmt_double(sample_quantile(at_point, 0.025)),
                         fmt_double(sample_quantile(at_point, 0.5)),
                         fmt_double(sample_quantile(at_point, 0.975))});
  }
  const std::vector<std::string> band_cols = {"minute", "mean", "q025", "q500",
                                              "q975"};
  write_csv(out.dir + "/predictive_band.csv", hash, band_cols, band_rows);
  out.artifacts["predictive_band"] = out.dir + "/predictive_band.csv";

  // Moments of the thinned draws.
  auto moment = [&](auto field) {
    double m1 = 0.0, m2 = 0.0;
    for (const PatientParams& q : fr.draws) {
      const double v = field(q);
      m1 += v;
      m2 += v * v;
    }
    m1 /= static_cast<double>(fr.draws.size());
    m2 /= static_cast<double>(fr.draws.size());
    const double var = std::max(0.0, m2 - m1 * m1);
    return std::pair<double, double>(m1, std::sqrt(var));
  };
  const auto [m_t0, sd_t0] = moment([](const PatientParams& q) { return q.theta0; });
  const auto [m_t1, sd_t1] = moment([](const PatientParams& q) { return q.theta1; });
  const auto [m_t2, sd_t2] = moment([](const PatientParams& q) { return q.theta2; });
  const auto [m_g0, sd_g0] = moment([](const PatientParams& q) { return q.g0; });

  json data_echo = json::array();
  for (const Observation& o : obs)
    data_echo.push_back(json{{"minute", static_cast<int>(std::lround(o.t_hours * 60.0))},
                             {"glucose", o.glucose}});

  json summary;
  summary["data"] = data_echo;
  summary["n_obs"] = obs.size();
  summary["fit_options"] = json{{"raw_iterations", cfg.data_fit.raw_iterations},
                                {"burn_in", cfg.data_fit.burn_in},
                                {"stride", cfg.data_fit.stride}};
  summary["draws"] = fr.draws.size();
  summary["acceptance_rate"] = fr.acceptance_rate;
  summary["failed_evals"] = fr.failed_evals;
  summary["posterior_mean"] = json{{"theta0", m_t0}, {"theta1", m_t1},
                                   {"theta2", m_t2}, {"g0", m_g0}};
  summary["posterior_sd"] = json{{"theta0", sd_t0}, {"theta1", sd_t1},
                                 {"theta2", sd_t2}, {"g0", sd_g0}};

  return finish(cfg, "fit", slug, summary, out, json::object(), started);
}

// ---- estimate -----------------------------------------------------------------

namespace {

void write_samples_csv(const std::string& path, const std::string& hash,
                       const DesignUtilityEstimate& est) {
  const std::vector<std::string> cols = {"index",  "u_hat",  "inner_se2",
                                         "excluded", "salt",  "theta0",
                                         "theta1", "theta2", "g0"};
  std::vector<std::vector<std::string>> rows;
  for (const UtilitySample& s : est.samples)
    rows.push_back({std::to_string(s.index), fmt_double(s.u_hat),
                    fmt_double(s.inner_se2), s.excluded ? "1" : "0",
                    std::to_string(s.salt),
                    fmt_double(s.generating_params.theta0),
                    fmt_double(s.generating_params.theta1),
                    fmt_double(s.generating_params.theta2),
                    fmt_double(s.generating_params.g0)});
  write_csv(path, hash, cols, rows);
}

}  // namespace

json run_estimate(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "estimate", {"design", "t1", "arm"});
  const Design d = design_from_json(args, "design");
  int t1 = cfg.t1;
  if (args.contains("t1")) {
    if (!args.at("t1").is_number_integer())
      throw InputError("estimate: t1 must be an integer");
    t1 = args.at("t1").get<int>();
  }
  if (t1 < 2) throw InputError("estimate: t1 must be at least 2");
  const std::string arm = args.value("arm", std::string("A"));
  if (arm.empty()) throw InputError("estimate: arm must be nonempty");

  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const OgttProblem problem = problem_from(cfg);

  StoreBackedArm a = open_arm(cfg, hash, d, arm);
  grow_arm(problem, cfg, a, d, arm, t1, workers);
  save_store(a.path, hash, a.est);

  const DesignUtilityEstimate est = prefix_estimate(a.est, t1);

  // t1 is part of the slug: estimating the same design at a different depth
  // is a different invocation and must not overwrite the shallower run.
  const std::string slug =
      "estimate_" + d.key() + "_" + arm + "_t" + std::to_string(t1);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  out.stores[est.scope] = a.path;

  write_samples_csv(out.dir + "/samples.csv", hash, est);
  out.artifacts["samples"] = out.dir + "/samples.csv";

  json summary = estimate_stats_json(est);
  summary["root_seed"] = cfg.seed;

  const json run_info = json{{"replicates_loaded", a.loaded},
                             {"replicates_computed", a.computed},
                             {"workers", workers}};
  return finish(cfg, "estimate", slug, summary, out, run_info, started);
}

// ---- compare ------------------------------------------------------------------

json run_compare(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "compare", {"design_a", "design_b"});
  const Design da = design_from_json(args, "design_a");
  const Design db = design_from_json(args, "design_b");

  const std::string slug = "compare_" + da.key() + "_vs_" + db.key();
  RunOutput out;
  out.dir = run_dir(cfg, slug);

  if (da == db) {
    // Identical schedules cannot beat each other; do not spend samples.
    json summary;
    summary["design_a"] = da.csv();
    summary["design_b"] = db.csv();
    summary["verdict"] = verdict_name(Verdict::kInconclusive);
    summary["z"] = 0.0;
    summary["note"] = "identical designs; no samples drawn";
    summary["looks"] = json::array();
    return finish(cfg, "compare", slug, summary, out, json::object(), started);
  }

  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const OgttProblem problem = problem_from(cfg);

  StoreBackedArm a = open_arm(cfg, hash, da, "A");
  StoreBackedArm b = open_arm(cfg, hash, db, "B");

  // Grow by the schedule, always testing prefixes of the stores so that the
  // look sequence is reproducible no matter how large the stores already are.
  const int looks = planned_looks(cfg.growth);
  const double alpha_look = cfg.growth.alpha / static_cast<double>(looks);
  std::vector<ComparisonResult> look_results;
  ComparisonResult final_result;
  int t1 = cfg.growth.t1_initial;
  for (;;) {
    grow_arm(problem, cfg, a, da, "A", t1, workers);
    grow_arm(problem, cfg, b, db, "B", t1, workers);
    final_result = compare(prefix_estimate(a.est, t1),
                           prefix_estimate(b.est, t1), alpha_look);
    look_results.push_back(final_result);
    if (final_result.verdict != Verdict::kInconclusive ||
        t1 >= cfg.growth.t1_max)
      break;
    t1 = std::min(t1 * cfg.growth.growth_factor, cfg.growth.t1_max);
  }

  save_store(a.path, hash, a.est);
  save_store(b.path, hash, b.est);
  out.stores[a.est.scope] = a.path;
  out.stores[b.est.scope] = b.path;

  std::vector<std::vector<std::string>> look_rows;
  for (size_t i = 0; i < look_results.size(); ++i) {
    const ComparisonResult& r = look_results[i];
    look_rows.push_back({std::to_string(i + 1), std::to_string(r.t1_a),
                         fmt_double(r.z), fmt_double(r.u_a), fmt_double(r.u_b),
                         fmt_double(r.var_a), fmt_double(r.var_b),
                         verdict_name(r.verdict)});
  }
  const std::vector<std::string> look_cols = {"look", "t1", "z",       "u_a",
                                              "u_b",  "var_a", "var_b", "verdict"};
  write_csv(out.dir + "/looks.csv", hash, look_cols, look_rows);
  out.artifacts["looks"] = out.dir + "/looks.csv";

  json summary;
  summary["design_a"] = da.csv();
  summary["design_b"] = db.csv();
  summary["growth"] = json{{"t1_initial", cfg.growth.t1_initial},
                           {"t1_max", cfg.growth.t1_max},
                           {"growth_factor", cfg.growth.growth_factor},
                           {"alpha", cfg.growth.alpha},
                           {"planned_looks", looks},
                           {"alpha_per_look", alpha_look}};
  summary["verdict"] = verdict_name(final_result.verdict);
  summary["z"] = final_result.z;
  summary["result"] = comparison_json(final_result);
  json looks_json = json::array();
  for (const ComparisonResult& r : look_results) looks_json.push_back(comparison_json(r));
  summary["looks"] = looks_json;

  const json run_info = json{{"replicates_loaded_a", a.loaded},
                             {"replicates_loaded_b", b.loaded},
                             {"replicates_computed", a.computed + b.computed},
                             {"workers", workers}};
  return finish(cfg, "compare", slug, summary, out, run_info, started);
}

// ---- search ---------------------------------------------------------------------

json run_search(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "search", {"k_values"});
  std::vector<int> ks = {2, 3, 4, 5};
  if (args.contains("k_values")) {
    if (!args.at("k_values").is_array() || args.at("k_values").empty())
      throw InputError("search: k_values must be a nonempty array");
    ks.clear();
    for (const json& v : args.at("k_values")) {
      if (!v.is_number_integer())
        throw InputError("search: k_values entries must be integers");
      ks.push_back(v.get<int>());
    }
  }

  const std::string slug = "search_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const OgttProblem problem = problem_from(cfg);

  TournamentOptions topt;
  topt.growth = cfg.growth;
  topt.t2 = cfg.t2;
  topt.root_seed = cfg.seed;
  topt.prefilter = cfg.prefilter.enabled;
  topt.prefilter_t1 = cfg.prefilter.t1;
  topt.prefilter_keep = cfg.prefilter.keep;
  topt.workers = workers;

  const SearchReport rep = search_over_k(problem, ks, cfg.grid_minutes, topt);

  // Persist each k-champion's samples; they seed future comparisons.
  for (const auto& [k, tr] : rep.tournaments) {
    const std::string path =
        store_path(cfg.out_dir, hash, tr.champion_estimate.scope);
    save_store(path, hash, tr.champion_estimate);
    out.stores[tr.champion_estimate.scope] = path;
  }

  const TournamentReport& chosen = rep.tournaments.at(rep.chosen_k);

  // Table-style summary: one row per k, the chosen row marked.
  std::vector<std::vector<std::string>> table_rows;
  for (const int k : rep.k_values) {
    const TournamentReport& tr = rep.tournaments.at(k);
    const DesignUtilityEstimate& e = tr.champion_estimate;
    // Dash-separated design keys: a comma form would split the CSV cell.
    table_rows.push_back({std::to_string(k), tr.champion.key(),
                          std::to_string(e.t1()), fmt_double(e.mean),
                          fmt_double(std::sqrt(e.variance_of_mean)),
                          std::to_string(tr.matches.size()),
                          tr.default_champion ? "1" : "0",
                          k == rep.chosen_k ? "1" : "0"});
  }
  const std::vector<std::string> table_cols = {
      "k",       "champion", "t1",     "u_hat",
      "se",      "matches",  "default", "chosen"};
  write_csv(out.dir + "/table.csv", hash, table_cols, table_rows);
  out.artifacts["table"] = out.dir + "/table.csv";

  json per_k = json::array();
  for (const int k : rep.k_values) {
    const TournamentReport& tr = rep.tournaments.at(k);
    json matches = json::array();
    for (const MatchRecord& mr : tr.matches) {
      json m = comparison_json(mr.result);
      m["champion_replaced"] = mr.champion_replaced;
      m["samples_reused"] = mr.samples_reused;
      m["samples_computed"] = mr.samples_computed;
      matches.push_back(m);
    }
    json ladder = json::array();
    for (const Design& d : tr.ladder_order) ladder.push_back(d.csv());
    per_k.push_back(json{{"k", k},
                         {"champion", tr.champion.csv()},
                         {"estimate", estimate_stats_json(tr.champion_estimate)},
                         {"default_champion", tr.default_champion},
                         {"ladder_order", ladder},
                         {"matches", matches},
                         {"samples_computed", tr.samples_computed},
                         {"samples_reused", tr.samples_reused}});
  }
  json k_comparisons = json::array();
  for (const KComparison& kc : rep.k_comparisons) {
    json c = comparison_json(kc.result);
    c["k_low"] = kc.k_low;
    c["k_high"] = kc.k_high;
    k_comparisons.push_back(c);
  }

  json summary;
  summary["grid_minutes"] = cfg.grid_minutes;
  summary["k_values"] = rep.k_values;
  summary["chosen_k"] = rep.chosen_k;
  summary["stopped"] = rep.stopped;
  summary["champion"] = chosen.champion.csv();
  summary["champion_estimate"] = estimate_stats_json(chosen.champion_estimate);
  summary["tournaments"] = per_k;
  summary["k_comparisons"] = k_comparisons;
  summary["samples_computed"] = rep.samples_computed;
  summary["samples_reused"] = rep.samples_reused;

  const json run_info = json{{"workers", workers}};
  return finish(cfg, "search", slug, summary, out, run_info, started);
}

// ---- validation commands ----------------------------------------------------------

json run_validate_random(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "validate-random", {"sizes", "trials"});
  std::vector<int> sizes = {4, 5, 6};
  if (args.contains("sizes")) {
    if (!args.at("sizes").is_array() || args.at("sizes").empty())
      throw InputError("validate-random: sizes must be a nonempty array");
    sizes.clear();
    for (const json& v : args.at("sizes")) {
      if (!v.is_number_integer())
        throw InputError("validate-random: sizes entries must be integers");
      sizes.push_back(v.get<int>());
    }
  }
  int trials = 100;
  if (args.contains("trials")) {
    if (!args.at("trials").is_number_integer())
      throw InputError("validate-random: trials must be an integer");
    trials = args.at("trials").get<int>();
  }
  if (trials < 2) throw InputError("validate-random: need at least 2 trials");

  const std::string slug = "validate-random_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const ValidationOptions vopt = validation_options(cfg, workers);

  const std::vector<RandomDesignSummary> studies =
      random_design_study(vopt, sizes, trials);

  json per_size = json::array();
  for (const RandomDesignSummary& s : studies) {
    // Trial-level CSV.
    std::vector<std::vector<std::string>> rows;
    std::vector<double> diffs;
    for (size_t i = 0; i < s.trials.size(); ++i) {
      const PairedTrial& t = s.trials[i];
      rows.push_back({std::to_string(i),
                      fmt_double(t.patient.theta0), fmt_double(t.patient.theta1),
                      fmt_double(t.patient.theta2), fmt_double(t.patient.g0),
                      t.random_design.key(), fmt_double(t.u_proposed),
                      fmt_double(t.u_random), fmt_double(t.difference())});
      diffs.push_back(t.difference());
    }
    const std::vector<std::string> cols = {
        "trial",  "theta0",     "theta1",   "theta2",    "g0",
        "random", "u_proposed", "u_random", "difference"};
    const std::string trials_path =
        out.dir + "/trials_size" + std::to_string(s.size) + ".csv";
    write_csv(trials_path, hash, cols, rows);
    out.artifacts["trials_size" + std::to_string(s.size)] = trials_path;

    // 10-bin histogram of the differences, one row per bin.
    const Histogram h = make_histogram(diffs, 10);
    std::vector<std::vector<std::string>> hist_rows;
    for (size_t bin = 0; bin < h.counts.size(); ++bin)
      hist_rows.push_back({fmt_double(h.edges[bin]), fmt_double(h.edges[bin + 1]),
                           std::to_string(h.counts[bin])});
    const std::vector<std::string> hist_cols = {"bin_lo", "bin_hi", "count"};
    const std::string hist_path =
        out.dir + "/hist_size" + std::to_string(s.size) + ".csv";
    write_csv(hist_path, hash, hist_cols, hist_rows);
    out.artifacts["hist_size" + std::to_string(s.size)] = hist_path;

    per_size.push_back(json{{"size", s.size},
                            {"trials", s.trials.size()},
                            {"mean_difference", s.mean_difference},
                            {"percentile_5", s.percentile_5},
                            {"pooled_se", s.pooled_se}});
  }

  json summary;
  summary["proposed"] = proposed_design().csv();
  summary["trials_per_size"] = trials;
  summary["sizes"] = per_size;

  const json run_info = json{{"workers", workers}};
  return finish(cfg, "validate-random", slug, summary, out, run_info, started);
}

json run_validate_surrogate(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "validate-surrogate", {"patients"});
  int patients = 17;
  if (args.contains("patients")) {
    if (!args.at("patients").is_number_integer())
      throw InputError("validate-surrogate: patients must be an integer");
    patients = args.at("patients").get<int>();
  }
  if (patients < 1)
    throw InputError("validate-surrogate: need at least one patient");

  const std::string slug = "validate-surrogate_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const ValidationOptions vopt = validation_options(cfg, workers);

  const std::vector<SurrogatePatient> cohort = synthetic_cohort(patients, vopt);
  const SurrogateStudyReport rep = surrogate_study(cohort, vopt);

  std::vector<std::vector<std::string>> rows;
  json comparisons = json::array();
  for (size_t i = 0; i < rep.comparisons.size(); ++i) {
    const SurrogateComparison& c = rep.comparisons[i];
    const PatientParams& p = cohort[i].params;
    rows.push_back({std::to_string(c.patient_id), fmt_double(p.theta0),
                    fmt_double(p.theta1), fmt_double(p.theta2),
                    fmt_double(p.g0), fmt_double(c.u_proposed),
                    fmt_double(c.u_conventional), fmt_double(c.quotient)});
    comparisons.push_back(json{{"patient_id", c.patient_id},
                               {"u_proposed", c.u_proposed},
                               {"u_conventional", c.u_conventional},
                               {"quotient", c.quotient}});
  }
  const std::vector<std::string> cols = {
      "patient_id", "theta0",     "theta1",         "theta2",
      "g0",         "u_proposed", "u_conventional", "quotient"};
  write_csv(out.dir + "/cohort.csv", hash, cols, rows);
  out.artifacts["cohort"] = out.dir + "/cohort.csv";

  json summary;
  summary["proposed"] = proposed_design().csv();
  summary["conventional"] = conventional_design().csv();
  summary["patients"] = patients;
  summary["proposed_better"] = rep.proposed_better;
  summary["fraction_proposed_better"] =
      static_cast<double>(rep.proposed_better) / static_cast<double>(patients);
  summary["comparisons"] = comparisons;

  const json run_info = json{{"workers", workers}};
  return finish(cfg, "validate-surrogate", slug, summary, out, run_info,
                started);
}

json run_validate_robust(const ExperimentConfig& cfg, const json& args) {
  const std::string started = now_iso8601_utc();
  require_arg_keys(args, "validate-robust", {"prior_draws"});
  int prior_draws = 200;
  if (args.contains("prior_draws")) {
    if (!args.at("prior_draws").is_number_integer())
      throw InputError("validate-robust: prior_draws must be an integer");
    prior_draws = args.at("prior_draws").get<int>();
  }
  if (prior_draws < 2)
    throw InputError("validate-robust: need at least 2 prior draws");

  const std::string slug = "validate-robust_" + args_tag(args);
  RunOutput out;
  out.dir = run_dir(cfg, slug);
  const std::string hash = config_hash(cfg);
  const int workers = effective_workers(cfg);
  const ValidationOptions vopt = validation_options(cfg, workers);

  const RobustnessReport rep = robustness_check(vopt, prior_draws);

  std::vector<std::vector<std::string>> band_rows;
  for (int m = 0; m < kCurveGridPoints; ++m)
    band_rows.push_back({std::to_string(m), fmt_double(rep.truth_curve[m]),
                         fmt_double(rep.band_lo[m]), fmt_double(rep.band_hi[m])});
  const std::vector<std::string> band_cols = {"minute", "truth", "band_lo",
                                              "band_hi"};
  write_csv(out.dir + "/band.csv", hash, band_cols, band_rows);
  out.artifacts["band"] = out.dir + "/band.csv";

  json summary;
  summary["truth"] = params_to_json(rep.truth);
  summary["design"] = rep.design.csv();
  summary["bad_design"] = rep.bad_design.csv();
  summary["prior_draws"] = prior_draws;
  summary["coverage"] = rep.coverage;
  summary["posterior_mean_ise"] = rep.posterior_mean_ise;
  summary["prior_mean_ise"] = rep.prior_mean_ise;
  summary["bad_design_ise"] = rep.bad_design_ise;

  const json run_info = json{{"workers", workers}};
  return finish(cfg, "validate-robust", slug, summary, out, run_info, started);
}

// ---- request dispatch ---------------------------------------------------------

std::string run_request(const std::string& request_json) {
  json req;
  try {
    req = json::parse(request_json);
  } catch (const json::exception& e) {
    throw InputError(std::string("request: invalid JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("command") ||
      !req.at("command").is_string())
    throw InputError("request: needs a \"command\" string");
  const std::string command = req.at("command").get<std::string>();
  for (const auto& [key, value] : req.items()) {
    (void)value;
    if (key != "command" && key != "config" && key != "config_path" &&
        key != "overrides" && key != "args")
      throw InputError("request: unknown key \"" + key + "\"");
  }
  if (req.contains("config") && req.contains("config_path"))
    throw InputError("request: give either config or config_path, not both");

  ExperimentConfig cfg;
  if (req.contains("config"))
    cfg = config_from_json(req.at("config").dump());
  else if (req.contains("config_path"))
    cfg = load_config(req.at("config_path").get<std::string>());
  else
    cfg = default_config();

  if (req.contains("overrides")) {
    const json& ov = req.at("overrides");
    if (!ov.is_object()) throw InputError("request: overrides must be an object");
    for (const auto& [key, value] : ov.items()) {
      (void)value;
      if (key != "seed" && key != "out_dir" && key != "workers")
        throw InputError("request: unknown override \"" + key + "\"");
    }
    if (ov.contains("seed")) cfg.seed = ov.at("seed").get<uint64_t>();
    if (ov.contains("out_dir"))
      cfg.out_dir = ov.at("out_dir").get<std::string>();
    if (ov.contains("workers")) cfg.workers = ov.at("workers").get<int>();
    cfg.validate();
  }

  const json args = req.value("args", json::object());

  json resp;
  if (command == "simulate")
    resp = run_simulate(cfg, args);
  else if (command == "fit")
    resp = run_fit(cfg, args);
  else if (command == "estimate")
    resp = run_estimate(cfg, args);
  else if (command == "compare")
    resp = run_compare(cfg, args);
  else if (command == "search")
    resp = run_search(cfg, args);
  else if (command == "validate-random")
    resp = run_validate_random(cfg, args);
  else if (command == "validate-surrogate")
    resp = run_validate_surrogate(cfg, args);
  else if (command == "validate-robust")
    resp = run_validate_robust(cfg, args);
  else
    throw InputError("request: unknown command \"" + command + "\"");
  return resp.dump(2) + "\n";
}

}  // namespace ogtt
