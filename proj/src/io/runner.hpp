#pragma once

#include <string>

#include <json.hpp>

#include "io/config.hpp"

namespace ogtt {

// One function per CLI command.  Each writes its artifacts (plus a
// per-command manifest) under cfg.out_dir/runs/<hash8>/<slug>/ — namespaced
// by config hash so runs under different configs never share a directory —
// and returns the response document:
//   { "command", "slug", "config_hash", "summary": {...}, "artifacts": {...},
//     "stores": {...}, "run": {...} }
// Everything under "summary"/"artifacts"/"stores" is byte-deterministic for
// a given config and seed; "run" holds per-invocation bookkeeping (sample
// reuse counts) and the manifest holds timestamps.
nlohmann::json run_simulate(const ExperimentConfig& cfg,
                            const nlohmann::json& args);
nlohmann::json run_fit(const ExperimentConfig& cfg, const nlohmann::json& args);
nlohmann::json run_estimate(const ExperimentConfig& cfg,
                            const nlohmann::json& args);
nlohmann::json run_compare(const ExperimentConfig& cfg,
                           const nlohmann::json& args);
nlohmann::json run_search(const ExperimentConfig& cfg,
                          const nlohmann::json& args);
nlohmann::json run_validate_random(const ExperimentConfig& cfg,
                                   const nlohmann::json& args);
nlohmann::json run_validate_surrogate(const ExperimentConfig& cfg,
                                      const nlohmann::json& args);
nlohmann::json run_validate_robust(const ExperimentConfig& cfg,
                                   const nlohmann::json& args);

// Top-level dispatch for the C API:
//   { "command": "estimate",
//     "config": {...} | "config_path": "cfg.json",   (default config if absent)
//     "overrides": {"seed": 1, "out_dir": "out", "workers": 4},
//     "args": {...} }
// Returns the response document serialized with dump(2).
std::string run_request(const std::string& request_json);

// Effective worker count: cfg.workers, or one per logical core when 0.
int effective_workers(const ExperimentConfig& cfg);

}  // namespace ogtt
