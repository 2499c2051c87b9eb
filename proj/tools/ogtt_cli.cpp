// Command-line front end.  Builds a JSON request from flags, hands it to the
// shared library through the C interface, and prints the response document;
// the library's status codes are the process exit codes.

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ogtt/ogtt.h"

using nlohmann::json;

namespace {

const char* code_name(int code) {
  switch (code) {
    case OGTT_OK:
      return "ok";
    case OGTT_ERR_INPUT:
      return "input";
    case OGTT_ERR_ESTIMATION:
      return "estimation";
    case OGTT_ERR_CONTRACT:
      return "contract";
    default:
      return "internal";
  }
}

std::vector<int> parse_int_list(const std::string& csv, const std::string& what) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (...) {
      throw CLI::ValidationError(what + ": \"" + token + "\" is not an integer");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what + ": empty list");
  return out;
}

json parse_params(const std::string& csv) {
  std::vector<double> v;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (...) {
      throw CLI::ValidationError("--params: \"" + token + "\" is not a number");
    }
  }
  if (v.size() != 4)
    throw CLI::ValidationError("--params needs theta0,theta1,theta2,g0");
  return json{{"theta0", v[0]}, {"theta1", v[1]}, {"theta2", v[2]}, {"g0", v[3]}};
}

int run(const json& request) {
  ogtt_ctx* ctx = ogtt_ctx_new();
  if (ctx == nullptr) {
    std::fprintf(stderr, "ogtt: cannot create context\n");
    return OGTT_ERR_INTERNAL;
  }
  char* response = nullptr;
  const int status = ogtt_run(ctx, request.dump().c_str(), &response);
  if (status == OGTT_OK) {
    std::fputs(response, stdout);
  } else {
    std::fprintf(stderr, "ogtt: error (%s): %s\n", code_name(status),
                 ogtt_last_error(ctx));
  }
  ogtt_string_free(response);
  ogtt_ctx_free(ctx);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian design of glucose tolerance test schedules"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir;
  int workers = 0;
  auto* opt_config =
      app.add_option("--config", config_path, "Experiment config JSON file");
  auto* opt_seed = app.add_option("--seed", seed, "Root seed override");
  auto* opt_out = app.add_option("--out", out_dir, "Output directory override");
  auto* opt_workers =
      app.add_option("--workers", workers, "Worker thread count (0 = cores)");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "Simulate one patient record");
  std::string sim_params, sim_design;
  double sim_sigma = -1.0;
  c_sim->add_option("--params", sim_params, "theta0,theta1,theta2,g0")
      ->required();
  auto* opt_sim_design = c_sim->add_option(
      "--design", sim_design, "Measurement minutes, e.g. 0,30,60,90,120");
  auto* opt_sim_sigma = c_sim->add_option(
      "--sigma", sim_sigma, "Noise sd for this simulation (0 = noiseless)");

  // fit
  auto* c_fit = app.add_subcommand("fit", "Fit the posterior to measurements");
  std::string fit_data;
  c_fit->add_option("--data", fit_data, "CSV of minute,glucose rows")
      ->required();

  // estimate
  auto* c_est = app.add_subcommand("estimate", "Estimate a schedule's utility");
  std::string est_design, est_arm = "A";
  int est_t1 = 0;
  c_est->add_option("--design", est_design, "Measurement minutes")->required();
  auto* opt_est_t1 =
      c_est->add_option("--t1", est_t1, "Outer replicates (default: config)");
  c_est->add_option("--arm", est_arm, "Seed-scope arm label (default A)");

  // compare
  auto* c_cmp = app.add_subcommand("compare", "Compare two schedules");
  std::string cmp_a, cmp_b;
  c_cmp->add_option("--design-a", cmp_a, "Schedule A minutes")->required();
  c_cmp->add_option("--design-b", cmp_b, "Schedule B minutes")->required();

  // search
  auto* c_search =
      app.add_subcommand("search", "Tournament search over the design grid");
  std::string search_ks;
  auto* opt_search_ks = c_search->add_option(
      "--k", search_ks, "Schedule sizes to try, e.g. 2,3,4 (default 2,3,4,5)");

  // validate-random
  auto* c_vr = app.add_subcommand("validate-random",
                                  "Proposed schedule vs random schedules");
  std::string vr_sizes;
  int vr_trials = 0;
  auto* opt_vr_sizes =
      c_vr->add_option("--sizes", vr_sizes, "Random-design sizes (default 4,5,6)");
  auto* opt_vr_trials =
      c_vr->add_option("--trials", vr_trials, "Trials per size (default 100)");

  // validate-surrogate
  auto* c_vs = app.add_subcommand("validate-surrogate",
                                  "Surrogate utility on a synthetic cohort");
  int vs_patients = 0;
  auto* opt_vs_patients =
      c_vs->add_option("--patients", vs_patients, "Cohort size (default 17)");

  // validate-robust
  auto* c_vb = app.add_subcommand("validate-robust",
                                  "Posterior quality on an extreme patient");
  int vb_draws = 0;
  auto* opt_vb_draws = c_vb->add_option("--prior-draws", vb_draws,
                                        "Prior sample size (default 200)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the input-error exit code; --help stays 0.
    return app.exit(e) == 0 ? 0 : OGTT_ERR_INPUT;
  }

  json request;
  json args = json::object();
  try {
    if (c_sim->parsed()) {
      request["command"] = "simulate";
      args["params"] = parse_params(sim_params);
      if (opt_sim_design->count() > 0) args["design"] = sim_design;
      if (opt_sim_sigma->count() > 0) args["sigma"] = sim_sigma;
    } else if (c_fit->parsed()) {
      request["command"] = "fit";
      args["data"] = fit_data;
    } else if (c_est->parsed()) {
      request["command"] = "estimate";
      args["design"] = est_design;
      if (opt_est_t1->count() > 0) args["t1"] = est_t1;
      args["arm"] = est_arm;
    } else if (c_cmp->parsed()) {
      request["command"] = "compare";
      args["design_a"] = cmp_a;
      args["design_b"] = cmp_b;
    } else if (c_search->parsed()) {
      request["command"] = "search";
      if (opt_search_ks->count() > 0)
        args["k_values"] = parse_int_list(search_ks, "--k");
    } else if (c_vr->parsed()) {
      request["command"] = "validate-random";
      if (opt_vr_sizes->count() > 0)
        args["sizes"] = parse_int_list(vr_sizes, "--sizes");
      if (opt_vr_trials->count() > 0) args["trials"] = vr_trials;
    } else if (c_vs->parsed()) {
      request["command"] = "validate-surrogate";
      if (opt_vs_patients->count() > 0) args["patients"] = vs_patients;
    } else if (c_vb->parsed()) {
      request["command"] = "validate-robust";
      if (opt_vb_draws->count() > 0) args["prior_draws"] = vb_draws;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e) == 0 ? 0 : OGTT_ERR_INPUT;
  }
  request["args"] = args;

  if (opt_config->count() > 0) request["config_path"] = config_path;
  json overrides = json::object();
  if (opt_seed->count() > 0) overrides["seed"] = seed;
  if (opt_out->count() > 0) overrides["out_dir"] = out_dir;
  if (opt_workers->count() > 0) overrides["workers"] = workers;
  if (!overrides.empty()) request["overrides"] = overrides;

  return run(request);
}
