#include <doctest.h>

#include "rrsim/config.hpp"

using namespace rrsim;
using nlohmann::json;

TEST_CASE("empty config resolves to defaults") {
  const ExperimentConfig c = config_from_json(json::object());
  CHECK(c.ecc.correction_capability_t == 72);
  CHECK(c.timing.t_r == 61.0);
  CHECK(c.retry.step_mv == 40.0);
  CHECK(c.sim.policy == "baseline");
  CHECK(c.workload.preset == "read90");
  CHECK(c.workload.synth.read_ratio == 0.9);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS(config_from_json(json{{"modle", json::object()}}));
  CHECK_THROWS(config_from_json(json{{"timing", {{"t_read", 3.0}}}}));
  CHECK_THROWS(config_from_json(json{{"sim", {{"sweep", {{"policy", "x"}}}}}}));
  try {
    config_from_json(json{{"ecc", {{"tt", 1}}}});
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("ecc.tt") != std::string::npos);
  }
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS(config_from_json(json{{"timing", {{"t_r", -1.0}}}}));
  CHECK_THROWS(config_from_json(json{{"timing", {{"t_r", "fast"}}}}));
  CHECK_THROWS(config_from_json(json{{"sim", {{"policy", "warp"}}}}));
  CHECK_THROWS(config_from_json(json{{"sim", {{"condition", "365"}}}}));
  CHECK_THROWS(config_from_json(json{{"retry", {{"characterize_guardband_sigmas", 2.0}}}}));
  CHECK_THROWS(config_from_json(json{{"workload", {{"preset", "read100"}}}}));
  CHECK_THROWS(config_from_json(json{{"model", {{"base_states", json::array()}}}}));
}

TEST_CASE("preset plus overrides") {
  const auto c = config_from_json(json{{"workload", {{"preset", "mixed50"}, {"mean_iat_us", 250.0}}}});
  CHECK(c.workload.synth.read_ratio == 0.5);
  CHECK(c.workload.synth.mean_iat_us == 250.0);
  CHECK(c.workload.synth.address == AddressDistribution::Uniform);
}

TEST_CASE("the resolved echo reproduces the config") {
  const auto c = config_from_json(json{{"timing", {{"speculative_abort", "free"}}},
                                       {"retry", {{"shape", "uniform"}, {"step_mv", 20.0}}},
                                       {"sim", {{"seed", 77}, {"condition", "180:1000"}, {"policy", "pr2ar2"}}}});
  const json echo = to_json(c);
  const auto again = config_from_json(echo);
  CHECK(to_json(again) == echo);
  CHECK(again.timing.speculative_abort == SpeculativeAbort::Free);
  CHECK(again.retry.shape == TableShape::Uniform);
  CHECK(again.sim.seed == 77);
  CHECK(fnv1a64(echo.dump()) == fnv1a64(to_json(again).dump()));
}

TEST_CASE("model section round trip") {
  ModelParams p;
  p.retention_coeff = 61.25;
  p.sensing_inflation_exp = 0.4;
  const auto back = model_from_json(model_to_json(p));
  CHECK(back.retention_coeff == 61.25);
  CHECK(back.sensing_inflation_exp == 0.4);
  CHECK(back.page_levels.boundaries == p.page_levels.boundaries);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
