#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/compare.hpp"
#include "core/estimator.hpp"
#include "core/inference.hpp"
#include "core/model.hpp"

namespace ogtt {

inline constexpr const char* kCodeVersion = "0.1.0";

// The inference prior's hyperparameters, spelled out so that a run's config
// records the full statistical model.  Only the values in
// supported_inference_prior() are accepted: the truncation handling in the
// samplers is written against exactly this family.
struct InferencePriorSpec {
  double theta01_shape = 2.0, theta01_scale = 1.0;
  double theta2_shape = 10.0, theta2_scale = 0.05;
  double theta2_min = 0.16;
  double g0_mean = 80.0, g0_sd = 10.0;
  double g0_min = 30.0, g0_max = 400.0;

  bool operator==(const InferencePriorSpec&) const = default;
};
InferencePriorSpec supported_inference_prior();

// Optional prescreening pass of the tournament.
struct PrefilterSpec {
  bool enabled = false;
  int t1 = 50;
  double keep = 0.2;
};

// Everything a run needs, serializable as one JSON document that is embedded
// verbatim in every artifact the run writes.
struct ExperimentConfig {
  ModelConstants constants;
  double sigma = kNoiseSd;
  InferencePriorSpec inference_prior;
  // Design-prior atoms from this JSON file ({"atoms": [{theta0...}, ...]});
  // empty path = the built-in three-archetype prior.
  std::string design_prior_file;
  std::vector<PatientParams> design_prior_atoms;  // resolved, not serialized

  FitOptions inner_fit{1500, 0, 15};  // truth-started chains inside Û
  FitOptions data_fit{1800, 300, 15}; // prior-mean-started fits of real data

  int t1 = 150;  // outer replicates for a one-shot estimate
  int t2 = 100;  // posterior draws per replicate; must match inner_fit
  GrowthSchedule growth;  // alpha lives here

  std::vector<int> grid_minutes;  // candidate times; default quarter hours
  double horizon_hours = 3.0;

  uint64_t seed = 0;
  std::string out_dir = "out";
  int workers = 0;  // 0 = one per logical core
  PrefilterSpec prefilter;

  void validate() const;  // throws InputError
  DesignPrior design_prior() const;
};

// Canonical JSON round-trip.  Unknown keys are rejected (a typo must not
// silently fall back to a default).
ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);  // canonical form

ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_config();

// Hash of the canonical serialization; stamped on every artifact.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace ogtt
