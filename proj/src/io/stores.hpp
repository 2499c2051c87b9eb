#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/estimator.hpp"

namespace ogtt {

// ---- Utility-sample stores ------------------------------------------------
//
// One JSONL file per (design, arm) seed scope: a meta line followed by one
// line per outer replicate, in index order.  Files are append-only; growing
// an estimate re-verifies the existing prefix byte-for-byte semantically
// (same meta, same samples) and appends only the new replicates.  Any
// mismatch means the file belongs to a different run and is a ContractError.

// stores/<hash8>/<scope with '/' -> '_'>.jsonl under out_dir.
std::string store_path(const std::string& out_dir,
                       const std::string& config_hash_hex,
                       const std::string& scope);

bool store_exists(const std::string& path);

// Write (or extend) the store.  The estimate's samples must extend what the
// file already holds, sample for sample.
void save_store(const std::string& path, const std::string& config_hash_hex,
                const DesignUtilityEstimate& est);

// Read a store back; statistics are recomputed from the samples.  A hash
// mismatch is a ContractError.
DesignUtilityEstimate load_store(const std::string& path,
                                 const std::string& config_hash_hex);

// ---- Deterministic text artifacts ------------------------------------------

// Shortest round-trip decimal form; integers get a trailing ".0" so columns
// stay recognizably floating point.
std::string fmt_double(double x);

// CSV with `# config_hash=<hex>` / `# version=<v>` comment lines, a header
// row, then data rows.  Deterministic bytes for deterministic inputs.
void write_csv(const std::string& path, const std::string& config_hash_hex,
               std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows);

// Write arbitrary text (JSON summaries) exactly.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// ---- Run manifest -----------------------------------------------------------
//
// Every run writes out_dir/manifest.json pointing at every artifact it
// produced.  Timestamps live only here, so re-running a command leaves every
// other artifact byte-identical.

struct RunManifest {
  std::string command;
  std::string config_hash_hex;
  std::string code_version;
  std::string started_at, finished_at;           // UTC, ISO 8601
  std::string config_json;                       // embedded verbatim
  std::map<std::string, std::string> artifacts;  // name -> path (under out_dir)
  std::map<std::string, std::string> stores;     // scope -> path
};

void write_manifest(const RunManifest& m, const std::string& out_dir);

std::string now_iso8601_utc();

}  // namespace ogtt
