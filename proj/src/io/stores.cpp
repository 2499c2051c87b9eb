#include "io/stores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "io/config.hpp"

namespace ogtt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string sanitize_scope(const std::string& scope) {
  std::string s = scope;
  for (char& ch : s)
    if (ch == '/') ch = '_';
  return s;
}

json sample_to_json(const UtilitySample& s) {
  return json{{"index", s.index},
              {"seed", s.seed},
              {"salt", s.salt},
              {"excluded", s.excluded},
              {"u_hat", s.u_hat},
              {"inner_se2", s.inner_se2},
              {"params",
               {{"theta0", s.generating_params.theta0},
                {"theta1", s.generating_params.theta1},
                {"theta2", s.generating_params.theta2},
                {"g0", s.generating_params.g0}}}};
}

UtilitySample sample_from_json(const json& j) {
  UtilitySample s;
  s.index = j.at("index").get<int>();
  s.seed = j.at("seed").get<uint64_t>();
  s.salt = j.at("salt").get<int>();
  s.excluded = j.at("excluded").get<bool>();
  s.u_hat = j.at("u_hat").get<double>();
  s.inner_se2 = j.at("inner_se2").get<double>();
  const json& p = j.at("params");
  s.generating_params.theta0 = p.at("theta0").get<double>();
  s.generating_params.theta1 = p.at("theta1").get<double>();
  s.generating_params.theta2 = p.at("theta2").get<double>();
  s.generating_params.g0 = p.at("g0").get<double>();
  return s;
}

json meta_json(const std::string& config_hash_hex,
               const DesignUtilityEstimate& est) {
  return json{{"kind", "utility_samples"},
              {"config_hash", config_hash_hex},
              {"design", est.design.csv()},
              {"scope", est.scope},
              {"root_seed", est.root_seed},
              {"t2", est.t2}};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("store: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

bool same_sample(const UtilitySample& a, const UtilitySample& b) {
  return a.index == b.index && a.seed == b.seed && a.salt == b.salt &&
         a.excluded == b.excluded && a.u_hat == b.u_hat &&
         a.inner_se2 == b.inner_se2 &&
         a.generating_params.theta0 == b.generating_params.theta0 &&
         a.generating_params.theta1 == b.generating_params.theta1 &&
         a.generating_params.theta2 == b.generating_params.theta2 &&
         a.generating_params.g0 == b.generating_params.g0;
}

}  // namespace

std::string store_path(const std::string& out_dir,
                       const std::string& config_hash_hex,
                       const std::string& scope) {
  const std::string hash8 = config_hash_hex.substr(0, 8);
  return out_dir + "/stores/" + hash8 + "/" + sanitize_scope(scope) + ".jsonl";
}

bool store_exists(const std::string& path) { return fs::exists(path); }

void save_store(const std::string& path, const std::string& config_hash_hex,
                const DesignUtilityEstimate& est) {
  fs::create_directories(fs::path(path).parent_path());

  size_t existing = 0;
  if (fs::exists(path)) {
    const DesignUtilityEstimate prior = load_store(path, config_hash_hex);
    if (prior.scope != est.scope || prior.root_seed != est.root_seed ||
        prior.t2 != est.t2 || !(prior.design == est.design))
      throw ContractError("store: " + path + " belongs to a different estimate");
    const size_t common = std::min(prior.samples.size(), est.samples.size());
    for (size_t i = 0; i < common; ++i)
      if (!same_sample(prior.samples[i], est.samples[i]))
        throw ContractError("store: " + path + " replicate " +
                            std::to_string(i) + " does not match; "
                            "stores are append-only");
    existing = prior.samples.size();
    // The file already holding more than the estimate is fine: the estimate
    // is a verified prefix of it and there is nothing to append.
    if (existing >= est.samples.size()) return;
  }

  std::ofstream out;
  if (existing == 0) {
    out.open(path, std::ios::trunc);
    if (!out) throw ContractError("store: cannot write " + path);
    out << meta_json(config_hash_hex, est).dump() << "\n";
  } else {
    out.open(path, std::ios::app);
    if (!out) throw ContractError("store: cannot write " + path);
  }
  for (size_t i = existing; i < est.samples.size(); ++i)
    out << sample_to_json(est.samples[i]).dump() << "\n";
}

DesignUtilityEstimate load_store(const std::string& path,
                                 const std::string& config_hash_hex) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw ContractError("store: " + path + " is empty");

  json meta;
  try {
    meta = json::parse(lines[0]);
  } catch (const json::exception& e) {
    throw ContractError("store: " + path + " meta line: " + e.what());
  }
  if (meta.value("kind", "") != std::string("utility_samples"))
    throw ContractError("store: " + path + " is not a utility sample store");
  if (meta.value("config_hash", "") != config_hash_hex)
    throw ContractError("store: " + path + " was written under a different config");

  DesignUtilityEstimate est;
  est.design = Design::parse(meta.at("design").get<std::string>());
  est.scope = meta.at("scope").get<std::string>();
  est.root_seed = meta.at("root_seed").get<uint64_t>();
  est.t2 = meta.at("t2").get<int>();
  est.samples.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ContractError("store: " + path + " line " + std::to_string(i + 1) +
                          ": " + e.what());
    }
    UtilitySample s = sample_from_json(j);
    if (s.index != static_cast<int>(i) - 1)
      throw ContractError("store: " + path + " replicates out of order");
    est.samples.push_back(s);
  }
  recompute_statistics(est);
  return est;
}

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  // to_chars shortest form may omit the point ("75") or use exponent form
  // ("7.5e+20"); tag plain integers so the column type stays obvious.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

void write_csv(const std::string& path, const std::string& config_hash_hex,
               std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("artifact: cannot write " + path);
  out << "# config_hash=" << config_hash_hex << "\n";
  out << "# version=" << kCodeVersion << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw ContractError("artifact: csv row width mismatch in " + path);
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i].find_first_of(",\n\"") != std::string::npos)
        throw ContractError("artifact: csv cell needs quoting in " + path);
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("artifact: cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("artifact: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_manifest(const RunManifest& m, const std::string& out_dir) {
  json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash_hex;
  j["code_version"] = m.code_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["config"] = json::parse(m.config_json);
  j["artifacts"] = m.artifacts;
  j["stores"] = m.stores;
  write_text(out_dir + "/manifest.json", j.dump(2) + "\n");
}

std::string now_iso8601_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace ogtt
