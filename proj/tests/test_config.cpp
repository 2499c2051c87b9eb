#include <doctest.h>

#include <cctype>
#include <string>

#include <json.hpp>

#include "core/errors.hpp"
#include "io/config.hpp"
#include "support/tmpdir.hpp"

using namespace ogtt;
using nlohmann::json;

namespace {

// Mutate one key of the default config's JSON and parse the result.
ExperimentConfig with(const std::string& pointer, const json& value) {
  json j = json::parse(config_to_json(default_config()));
  j[json::json_pointer(pointer)] = value;
  return config_from_json(j.dump());
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("default config is valid and internally consistent") {
  const ExperimentConfig cfg = default_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.t2 == thinned_draw_count(cfg.inner_fit));
  CHECK(cfg.grid_minutes ==
        std::vector<int>{15, 30, 45, 60, 75, 90, 105, 120});
  CHECK(cfg.horizon_hours == 3.0);
  CHECK(cfg.sigma == 5.0);
  // Empty atom list means the built-in three-archetype prior.
  CHECK(cfg.design_prior().atoms.size() == 3);
}

TEST_CASE("canonical serialization round-trips exactly") {
  const ExperimentConfig cfg = default_config();
  const std::string text = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("hash is 16 lowercase hex chars and tracks content") {
  const std::string h = config_hash(default_config());
  CHECK(h.size() == 16);
  for (const char c : h)
    CHECK((std::isdigit(static_cast<unsigned char>(c)) ||
           (c >= 'a' && c <= 'f')));
  CHECK(config_hash(with("/seed", 1)) != h);
  CHECK(config_hash(with("/t1", 151)) != h);
  CHECK(config_hash(with("/seed", 0)) == h);  // explicit default, same bytes
}

TEST_CASE("partial documents inherit defaults") {
  const ExperimentConfig cfg = config_from_json(R"({"seed": 5})");
  CHECK(cfg.seed == 5);
  CHECK(cfg.t1 == default_config().t1);
  CHECK(config_from_json("{}").out_dir == "out");
}

TEST_CASE("seed accepts the full uint64 range") {
  const uint64_t big = 18446744073709551615ull;
  CHECK(with("/seed", big).seed == big);
}

TEST_CASE("unknown keys are rejected, not silently dropped") {
  CHECK_THROWS_AS(config_from_json(R"({"sead": 5})"), InputError);
  CHECK_THROWS_AS(config_from_json(R"({"growth": {"t1_init": 30}})"),
                  InputError);
  CHECK_THROWS_AS(config_from_json(R"({"constants": {"d": 1.0}})"),
                  InputError);
  CHECK_THROWS_AS(config_from_json("[1,2]"), InputError);
  CHECK_THROWS_AS(config_from_json("not json"), InputError);
}

TEST_CASE("validation rejects inconsistent settings") {
  // t2 must match the inner chain's thinned draw count.
  CHECK_THROWS_AS(with("/t2", 99), InputError);
  // ... but changing both consistently is fine.
  json j = json::parse(config_to_json(default_config()));
  j["t2"] = 60;
  j["inner_fit"]["raw_iterations"] = 900;
  CHECK(config_from_json(j.dump()).t2 == 60);

  CHECK_THROWS_AS(with("/horizon_hours", 2.0), InputError);
  CHECK_THROWS_AS(with("/sigma", 0.0), InputError);
  CHECK_THROWS_AS(with("/sigma", -1.0), InputError);
  CHECK_THROWS_AS(with("/t1", 1), InputError);
  CHECK_THROWS_AS(with("/workers", -1), InputError);
  CHECK_THROWS_AS(with("/out_dir", ""), InputError);
  CHECK_THROWS_AS(with("/growth/alpha", 0.0), InputError);
  CHECK_THROWS_AS(with("/growth/alpha", 1.0), InputError);
  CHECK_THROWS_AS(with("/growth/t1_initial", 10), InputError);
  CHECK_THROWS_AS(with("/growth/growth_factor", 1), InputError);
  CHECK_THROWS_AS(with("/grid_minutes", json::array()), InputError);
  CHECK_THROWS_AS(with("/grid_minutes", json::array({30, 30})), InputError);
  CHECK_THROWS_AS(with("/grid_minutes", json::array({0, 30})), InputError);
  CHECK_THROWS_AS(with("/grid_minutes", json::array({30, 150})), InputError);
  CHECK_THROWS_AS(with("/inner_fit/stride", 0), InputError);
  CHECK_THROWS_AS(with("/data_fit/burn_in", 5000), InputError);
}

TEST_CASE("prefilter settings validate when enabled") {
  json j = json::parse(config_to_json(default_config()));
  j["prefilter"]["enabled"] = true;
  j["prefilter"]["t1"] = 50;
  j["prefilter"]["keep"] = 0.25;
  CHECK(config_from_json(j.dump()).prefilter.enabled);
  j["prefilter"]["keep"] = 0.0;
  CHECK_THROWS_AS(config_from_json(j.dump()), InputError);
  j["prefilter"]["keep"] = 1.5;
  CHECK_THROWS_AS(config_from_json(j.dump()), InputError);
}

TEST_CASE("only the supported inference prior is accepted") {
  CHECK_NOTHROW(with("/inference_prior/g0_sd", 10.0));
  CHECK_THROWS_AS(with("/inference_prior/g0_sd", 11.0), InputError);
  CHECK_THROWS_AS(with("/inference_prior/theta2_min", 0.15), InputError);
}

TEST_CASE("design prior atoms load from a file and are validated") {
  const std::string dir = ogtt_test::fresh_dir("config_atoms");
  const std::string good = dir + "/atoms.json";
  ogtt_test::spit(good, R"({"atoms": [
    {"theta0": 1.0, "theta1": 0.5, "theta2": 0.6, "g0": 85.0},
    {"theta0": 2.0, "theta1": 1.5, "theta2": 0.4, "g0": 75.0}
  ]})");
  const ExperimentConfig cfg = with("/design_prior_file", good);
  CHECK(cfg.design_prior().atoms.size() == 2);
  CHECK(cfg.design_prior().atoms[1].g0 == 75.0);
  // The canonical serialization records the path, not the resolved atoms.
  CHECK(json::parse(config_to_json(cfg)).at("design_prior_file") == good);

  const std::string bad = dir + "/bad.json";
  // theta2 below the prior's truncation point is outside the support.
  ogtt_test::spit(bad, R"({"atoms": [
    {"theta0": 1.0, "theta1": 0.5, "theta2": 0.10, "g0": 85.0}
  ]})");
  CHECK_THROWS_AS(with("/design_prior_file", bad), InputError);

  CHECK_THROWS_AS(with("/design_prior_file", dir + "/missing.json"),
                  InputError);
  const std::string typo = dir + "/typo.json";
  ogtt_test::spit(typo, R"({"atoms": [{"theta_0": 1.0}]})");
  CHECK_THROWS_AS(with("/design_prior_file", typo), InputError);
}

TEST_CASE("load_config reads a file and rejects a missing one") {
  const std::string dir = ogtt_test::fresh_dir("config_load");
  const std::string path = dir + "/cfg.json";
  ogtt_test::spit(path, config_to_json(default_config()));
  CHECK(config_hash(load_config(path)) == config_hash(default_config()));
  CHECK_THROWS_AS(load_config(dir + "/nope.json"), InputError);
}

}  // TEST_SUITE
