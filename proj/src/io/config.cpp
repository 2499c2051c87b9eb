#include "io/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ogtt {

using nlohmann::json;  // std::map-backed: dump() emits keys sorted

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw InputError("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw InputError("config: unknown key \"" + key + "\" in " + where);
  }
}

double num(const json& j, const std::string& where, const std::string& key,
           double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw InputError("config: " + where + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& where, const std::string& key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw InputError("config: " + where + "." + key + " must be an integer");
  return v.get<int>();
}

json fit_to_json(const FitOptions& f) {
  return json{{"raw_iterations", f.raw_iterations},
              {"burn_in", f.burn_in},
              {"stride", f.stride}};
}

FitOptions fit_from_json(const json& j, const std::string& where,
                         const FitOptions& fallback) {
  require_keys(j, where, {"raw_iterations", "burn_in", "stride"});
  FitOptions f;
  f.raw_iterations = integer(j, where, "raw_iterations", fallback.raw_iterations);
  f.burn_in = integer(j, where, "burn_in", fallback.burn_in);
  f.stride = integer(j, where, "stride", fallback.stride);
  return f;
}

}  // namespace

InferencePriorSpec supported_inference_prior() { return InferencePriorSpec{}; }

void ExperimentConfig::validate() const {
  constants.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InputError("config: sigma must be positive and finite");
  if (!(inference_prior == supported_inference_prior()))
    throw InputError(
        "config: inference_prior must match the supported family "
        "(Gamma(2,1), Gamma(2,1), Gamma(10,0.05) on theta2>0.16, "
        "N(80,10) on [30,400])");
  design_prior().validate();

  auto check_fit = [](const FitOptions& f, const std::string& name) {
    if (f.raw_iterations < 1 || f.burn_in < 0 || f.stride < 1 ||
        f.burn_in >= f.raw_iterations || thinned_draw_count(f) < 1)
      throw InputError("config: " + name + " cannot yield a draw");
  };
  check_fit(inner_fit, "inner_fit");
  check_fit(data_fit, "data_fit");

  if (t2 != thinned_draw_count(inner_fit))
    throw InputError("config: t2 must equal the thinned draw count of inner_fit");
  if (t1 < 2) throw InputError("config: t1 must be at least 2");
  if (growth.t1_initial < 30 || growth.t1_max < growth.t1_initial ||
      growth.growth_factor < 2)
    throw InputError("config: growth schedule must satisfy 30 <= t1_initial <= t1_max, factor >= 2");
  if (!(growth.alpha > 0.0 && growth.alpha < 1.0))
    throw InputError("config: growth.alpha must lie in (0, 1)");

  if (grid_minutes.empty())
    throw InputError("config: grid_minutes must be nonempty");
  for (size_t i = 0; i < grid_minutes.size(); ++i) {
    if (grid_minutes[i] <= 0 || grid_minutes[i] > 120)
      throw InputError("config: grid minutes must lie in (0, 120]");
    if (i > 0 && grid_minutes[i] <= grid_minutes[i - 1])
      throw InputError("config: grid minutes must be strictly increasing");
  }

  if (horizon_hours != 3.0)
    throw InputError("config: horizon_hours must be 3 (the utility grid is fixed)");
  if (out_dir.empty()) throw InputError("config: out_dir must be nonempty");
  if (workers < 0) throw InputError("config: workers must be 0 (auto) or positive");
  if (prefilter.enabled) {
    if (prefilter.t1 < 2) throw InputError("config: prefilter.t1 must be at least 2");
    if (!(prefilter.keep > 0.0 && prefilter.keep <= 1.0))
      throw InputError("config: prefilter.keep must lie in (0, 1]");
  }
}

DesignPrior ExperimentConfig::design_prior() const {
  if (design_prior_atoms.empty()) return default_design_prior();
  return DesignPrior{design_prior_atoms};
}

namespace {

std::vector<PatientParams> atoms_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open design prior file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("config: design prior file " + path + ": " + e.what());
  }
  require_keys(j, "design prior file", {"atoms"});
  if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty())
    throw InputError("config: design prior file needs a nonempty \"atoms\" array");
  std::vector<PatientParams> atoms;
  for (const json& a : j.at("atoms")) {
    require_keys(a, "design prior atom", {"theta0", "theta1", "theta2", "g0"});
    PatientParams p;
    p.theta0 = num(a, "atom", "theta0", 0.0);
    p.theta1 = num(a, "atom", "theta1", 0.0);
    p.theta2 = num(a, "atom", "theta2", 0.5);
    p.g0 = num(a, "atom", "g0", 80.0);
    atoms.push_back(p);
  }
  return atoms;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(j, "config",
               {"constants", "sigma", "inference_prior", "design_prior_file",
                "inner_fit", "data_fit", "t1", "t2", "growth", "grid_minutes",
                "horizon_hours", "seed", "out_dir", "workers", "prefilter"});

  ExperimentConfig cfg = default_config();

  if (j.contains("constants")) {
    const json& c = j.at("constants");
    require_keys(c, "constants", {"a", "b", "c", "g_b", "v0"});
    cfg.constants.a = num(c, "constants", "a", cfg.constants.a);
    cfg.constants.b = num(c, "constants", "b", cfg.constants.b);
    cfg.constants.c = num(c, "constants", "c", cfg.constants.c);
    cfg.constants.g_b = num(c, "constants", "g_b", cfg.constants.g_b);
    cfg.constants.v0 = num(c, "constants", "v0", cfg.constants.v0);
  }
  cfg.sigma = num(j, "config", "sigma", cfg.sigma);

  if (j.contains("inference_prior")) {
    const json& p = j.at("inference_prior");
    require_keys(p, "inference_prior",
                 {"theta01_shape", "theta01_scale", "theta2_shape",
                  "theta2_scale", "theta2_min", "g0_mean", "g0_sd", "g0_min",
                  "g0_max"});
    InferencePriorSpec& s = cfg.inference_prior;
    s.theta01_shape = num(p, "inference_prior", "theta01_shape", s.theta01_shape);
    s.theta01_scale = num(p, "inference_prior", "theta01_scale", s.theta01_scale);
    s.theta2_shape = num(p, "inference_prior", "theta2_shape", s.theta2_shape);
    s.theta2_scale = num(p, "inference_prior", "theta2_scale", s.theta2_scale);
    s.theta2_min = num(p, "inference_prior", "theta2_min", s.theta2_min);
    s.g0_mean = num(p, "inference_prior", "g0_mean", s.g0_mean);
    s.g0_sd = num(p, "inference_prior", "g0_sd", s.g0_sd);
    s.g0_min = num(p, "inference_prior", "g0_min", s.g0_min);
    s.g0_max = num(p, "inference_prior", "g0_max", s.g0_max);
  }

  if (j.contains("design_prior_file")) {
    if (!j.at("design_prior_file").is_string())
      throw InputError("config: design_prior_file must be a string");
    cfg.design_prior_file = j.at("design_prior_file").get<std::string>();
  }
  if (!cfg.design_prior_file.empty())
    cfg.design_prior_atoms = atoms_from_file(cfg.design_prior_file);

  if (j.contains("inner_fit"))
    cfg.inner_fit = fit_from_json(j.at("inner_fit"), "inner_fit", cfg.inner_fit);
  if (j.contains("data_fit"))
    cfg.data_fit = fit_from_json(j.at("data_fit"), "data_fit", cfg.data_fit);

  cfg.t1 = integer(j, "config", "t1", cfg.t1);
  cfg.t2 = integer(j, "config", "t2", cfg.t2);

  if (j.contains("growth")) {
    const json& g = j.at("growth");
    require_keys(g, "growth", {"t1_initial", "t1_max", "growth_factor", "alpha"});
    cfg.growth.t1_initial = integer(g, "growth", "t1_initial", cfg.growth.t1_initial);
    cfg.growth.t1_max = integer(g, "growth", "t1_max", cfg.growth.t1_max);
    cfg.growth.growth_factor = integer(g, "growth", "growth_factor", cfg.growth.growth_factor);
    cfg.growth.alpha = num(g, "growth", "alpha", cfg.growth.alpha);
  }

  if (j.contains("grid_minutes")) {
    const json& g = j.at("grid_minutes");
    if (!g.is_array()) throw InputError("config: grid_minutes must be an array");
    cfg.grid_minutes.clear();
    for (const json& v : g) {
      if (!v.is_number_integer())
        throw InputError("config: grid_minutes entries must be integers");
      cfg.grid_minutes.push_back(v.get<int>());
    }
  }

  cfg.horizon_hours = num(j, "config", "horizon_hours", cfg.horizon_hours);

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw InputError("config: seed must be a nonnegative integer");
    if (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)
      throw InputError("config: seed must be a nonnegative integer");
    cfg.seed = s.get<uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j.at("out_dir").is_string())
      throw InputError("config: out_dir must be a string");
    cfg.out_dir = j.at("out_dir").get<std::string>();
  }
  cfg.workers = integer(j, "config", "workers", cfg.workers);

  if (j.contains("prefilter")) {
    const json& p = j.at("prefilter");
    require_keys(p, "prefilter", {"enabled", "t1", "keep"});
    if (p.contains("enabled")) {
      if (!p.at("enabled").is_boolean())
        throw InputError("config: prefilter.enabled must be a boolean");
      cfg.prefilter.enabled = p.at("enabled").get<bool>();
    }
    cfg.prefilter.t1 = integer(p, "prefilter", "t1", cfg.prefilter.t1);
    cfg.prefilter.keep = num(p, "prefilter", "keep", cfg.prefilter.keep);
  }

  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["constants"] = json{{"a", cfg.constants.a},
                        {"b", cfg.constants.b},
                        {"c", cfg.constants.c},
                        {"g_b", cfg.constants.g_b},
                        {"v0", cfg.constants.v0}};
  j["sigma"] = cfg.sigma;
  const InferencePriorSpec& s = cfg.inference_prior;
  j["inference_prior"] = json{{"theta01_shape", s.theta01_shape},
                              {"theta01_scale", s.theta01_scale},
                              {"theta2_shape", s.theta2_shape},
                              {"theta2_scale", s.theta2_scale},
                              {"theta2_min", s.theta2_min},
                              {"g0_mean", s.g0_mean},
                              {"g0_sd", s.g0_sd},
                              {"g0_min", s.g0_min},
                              {"g0_max", s.g0_max}};
  j["design_prior_file"] = cfg.design_prior_file;
  j["inner_fit"] = fit_to_json(cfg.inner_fit);
  j["data_fit"] = fit_to_json(cfg.data_fit);
  j["t1"] = cfg.t1;
  j["t2"] = cfg.t2;
  j["growth"] = json{{"t1_initial", cfg.growth.t1_initial},
                     {"t1_max", cfg.growth.t1_max},
                     {"growth_factor", cfg.growth.growth_factor},
                     {"alpha", cfg.growth.alpha}};
  j["grid_minutes"] = cfg.grid_minutes;
  j["horizon_hours"] = cfg.horizon_hours;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["workers"] = cfg.workers;
  j["prefilter"] = json{{"enabled", cfg.prefilter.enabled},
                        {"t1", cfg.prefilter.t1},
                        {"keep", cfg.prefilter.keep}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.grid_minutes = [] {
    std::vector<int> g;
    for (int m = 15; m <= 120; m += 15) g.push_back(m);
    return g;
  }();
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const uint64_t h = fnv1a64(config_to_json(cfg));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace ogtt
