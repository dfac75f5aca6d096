#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <string>

#include "doctest.h"

#include "csd/config.hpp"
#include "csd/errors.hpp"

using namespace csd;
using nlohmann::json;

namespace {

std::string message_of(const std::exception& e) { return e.what(); }

// ConfigError messages must name the offending key so a user can act on
// them without reading the source.
template <typename Fn>
std::string config_error_message(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return message_of(e);
  }
  FAIL("expected a ConfigError");
  return {};
}

}  // namespace

TEST_CASE("defaults survive a json round trip") {
  const RunConfig original;
  const json encoded = config_to_json(original);
  const RunConfig decoded = config_from_json(encoded);
  CHECK(config_to_json(decoded) == encoded);
  CHECK(decoded.alpha2 == 0.16);
  CHECK(decoded.detector.eta == 0.55);
  CHECK(decoded.detector.xi == 0.996);
  CHECK(decoded.homodyne.efficiency == 0.858);
  CHECK(decoded.homodyne.excess_noise == 0.005);
  CHECK(decoded.policy == DisplacementPolicy::optimize);
  CHECK(decoded.gamma2 == 24.7);
  CHECK(decoded.engine_analytic);
  CHECK_FALSE(decoded.engine_monte_carlo);
  CHECK(decoded.mode == Mode::ideal);
  CHECK_FALSE(decoded.seed.has_value());
  CHECK_FALSE(decoded.beta2_grid.has_value());
  CHECK(decoded.alpha2_grid.points == 81);
}

TEST_CASE("optional members only appear once set") {
  RunConfig cfg;
  cfg.seed = 42;
  cfg.beta2_grid = GridSpec{0.0, 2.0, 25};
  const json encoded = config_to_json(cfg);
  CHECK(encoded.contains("seed"));
  CHECK(encoded.contains("beta2_grid"));
  const RunConfig decoded = config_from_json(encoded);
  REQUIRE(decoded.seed.has_value());
  CHECK(*decoded.seed == 42);
  REQUIRE(decoded.beta2_grid.has_value());
  CHECK(decoded.beta2_grid->points == 25);
  CHECK(config_to_json(decoded) == encoded);
}

TEST_CASE("partial documents inherit defaults") {
  const json j = {{"alpha2", 0.5},
                  {"detector", {{"eta", 0.9}}},
                  {"engine", "both"},
                  {"beta2_grid", {{"max", 2.0}}}};
  const RunConfig cfg = config_from_json(j);
  CHECK(cfg.alpha2 == 0.5);
  CHECK(cfg.detector.eta == 0.9);
  CHECK(cfg.detector.xi == 0.996);  // untouched member keeps its default
  CHECK(cfg.engine_analytic);
  CHECK(cfg.engine_monte_carlo);
  REQUIRE(cfg.beta2_grid.has_value());
  CHECK(cfg.beta2_grid->min == 0.0);
  CHECK(cfg.beta2_grid->max == 2.0);
  CHECK(cfg.beta2_grid->points == 50);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK(config_error_message([] {
          config_from_json(json{{"alpha3", 1.0}});
        }).find("alpha3") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"detector", {{"etaa", 0.5}}}});
        }).find("detector.etaa") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"gamma2_grid", {{"step", 0.1}}}});
        }).find("gamma2_grid.step") != std::string::npos);
}

TEST_CASE("type errors are reported against the key") {
  CHECK(config_error_message([] {
          config_from_json(json{{"alpha2", "big"}});
        }).find("alpha2") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"trials", -5}});
        }).find("non-negative") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"alpha2_grid", 7}});
        }).find("alpha2_grid") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"engine", "quantum"}});
        }).find("engine") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"mode", "raw"}});
        }).find("mode") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(
              json{{"displacement", {{"policy", "nonsense"}}}});
        }).find("nonsense") != std::string::npos);
  CHECK(config_error_message([] {
          config_from_json(json{{"crossover", {{"bracket", {0.1}}}}});
        }).find("crossover.bracket") != std::string::npos);
  CHECK_THROWS_AS(config_from_json(json::array({1, 2})), ConfigError);
}

TEST_CASE("crossover block parses receivers and bracket") {
  const json j = {{"crossover",
                   {{"first", "helstrom"},
                    {"second", "opt_displacement"},
                    {"bracket", {0.1, 0.9}}}}};
  const RunConfig cfg = config_from_json(j);
  CHECK(cfg.crossover_first == Receiver::helstrom);
  CHECK(cfg.crossover_second == Receiver::displacement_opt);
  CHECK(cfg.crossover_lo == 0.1);
  CHECK(cfg.crossover_hi == 0.9);
}

TEST_CASE("validation accepts the defaults") {
  CHECK_NOTHROW(validate_config(RunConfig{}, false));
}

TEST_CASE("validation rejects out-of-range members by name") {
  auto message_for = [](auto mutate, bool needs_seed = false) {
    RunConfig cfg;
    mutate(cfg);
    return config_error_message(
        [&] { validate_config(cfg, needs_seed); });
  };
  CHECK(message_for([](RunConfig& c) { c.prior_plus = 0.4; })
            .find("prior_plus") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.detector.eta = 1.5; })
            .find("detector.eta") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.detector.nu = -0.1; })
            .find("detector.nu") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.transmittance = 0.0; })
            .find("transmittance") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.gamma2 = 0.0; })
            .find("gamma2") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.workers = 0; })
            .find("workers") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.format = "xml"; })
            .find("format") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.gamma2_grid.min = 0.0; })
            .find("gamma2_grid.min") != std::string::npos);
  CHECK(message_for([](RunConfig& c) { c.crossover_hi = 0.01; })
            .find("crossover.bracket") != std::string::npos);
  CHECK(message_for([](RunConfig& c) {
          c.engine_monte_carlo = true;
          c.trials = 0;
          c.seed = 1;
        }).find("trials") != std::string::npos);
  CHECK(message_for([](RunConfig& c) {
          c.mode = Mode::corrected;
          c.detector.eta = 0.0;
        }).find("detector.eta") != std::string::npos);
}

TEST_CASE("sampling commands demand an explicit seed") {
  RunConfig cfg;
  const std::string msg =
      config_error_message([&] { validate_config(cfg, true); });
  CHECK(msg.find("seed") != std::string::npos);
  cfg.seed = 7;
  CHECK_NOTHROW(validate_config(cfg, true));
}

TEST_CASE("engine options mirror the config") {
  RunConfig cfg;
  cfg.engine_analytic = true;
  cfg.engine_monte_carlo = true;
  cfg.trials = 1234;
  cfg.seed = 9;
  cfg.workers = 3;
  const EngineOptions e = engine_options(cfg);
  CHECK(e.analytic);
  CHECK(e.monte_carlo);
  CHECK(e.trials == 1234);
  CHECK(e.seed == 9);
  CHECK(e.workers == 3);
  cfg.seed.reset();
  CHECK(engine_options(cfg).seed == 0);
}

TEST_CASE("output documents reload as their own config") {
  RunConfig cfg;
  cfg.alpha2 = 0.3;
  cfg.seed = 11;
  const json doc =
      make_output_document("compare", cfg, json{{"result", 1.0}});
  CHECK(doc.at("provenance").at("tool") == "csd");
  CHECK(doc.at("provenance").at("command") == "compare");
  CHECK(doc.at("result") == 1.0);

  const RunConfig reloaded = config_from_json(doc);
  CHECK(config_to_json(reloaded) == config_to_json(cfg));

  CHECK(config_error_message([] {
          config_from_json(json{{"provenance", {{"tool", "csd"}}}});
        }).find("config") != std::string::npos);
}

TEST_CASE("sweep payload serialization") {
  SweepResult r;
  r.axis_name = "alpha2";
  r.axis_values = {0.1, 0.2};
  r.series.push_back(SweepSeries{"kennedy", {0.3, 0.2}});
  r.annotations["note"] = 1.5;
  r.warnings.push_back("w");
  const json j = sweep_to_json(r);
  CHECK(j.at("axis").at("name") == "alpha2");
  CHECK(j.at("axis").at("values") == json::array({0.1, 0.2}));
  CHECK(j.at("series").size() == 1);
  CHECK(j.at("series")[0].at("name") == "kennedy");
  CHECK(j.at("annotations").at("note") == 1.5);
  CHECK(j.at("warnings") == json::array({"w"}));
  // Text rendering must be deterministic, byte for byte.
  CHECK(document_to_text(j) == document_to_text(j));
  CHECK(document_to_text(j).back() == '\n');
}

TEST_CASE("config files round trip through disk") {
  const std::string path = "test_config_round_trip.json";
  RunConfig cfg;
  cfg.alpha2 = 0.7;
  cfg.seed = 5;
  write_text_file(path, config_to_json(cfg).dump(2) + "\n");
  const RunConfig loaded = load_config_file(path);
  CHECK(config_to_json(loaded) == config_to_json(cfg));
  std::remove(path.c_str());
}

TEST_CASE("file errors carry the path") {
  CHECK_THROWS_AS(read_text_file("no_such_directory/no_such_file.json"),
                  IoError);
  CHECK_THROWS_AS(
      write_text_file("no_such_directory/no_such_file.json", "x"),
      IoError);
  const std::string path = "test_config_bad.json";
  write_text_file(path, "{ not json");
  CHECK(config_error_message([&] { load_config_file(path); })
            .find("not valid JSON") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("policy names round trip") {
  for (DisplacementPolicy p :
       {DisplacementPolicy::fixed_beta, DisplacementPolicy::fixed_gamma,
        DisplacementPolicy::optimize}) {
    CHECK(policy_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(policy_from_string("auto"), ConfigError);
}
