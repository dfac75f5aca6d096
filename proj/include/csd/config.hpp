#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "csd/experiments.hpp"

namespace csd {

// How the displacement stage is chosen by the experiment commands.
enum class DisplacementPolicy { fixed_beta, fixed_gamma, optimize };

std::string to_string(DisplacementPolicy policy);
DisplacementPolicy policy_from_string(const std::string& name);

struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  std::size_t points = 2;

  std::vector<double> values() const { return linspace(min, max, points); }
};

// Complete description of a run. Every command consumes the same record;
// file values are overridden by flags and the effective result is echoed
// into each output's provenance block, so any output can reproduce itself.
// Detector and homodyne defaults mirror the benchmark apparatus.
struct RunConfig {
  double alpha2 = 0.16;
  GridSpec alpha2_grid{0.0, 2.0, 81};
  double prior_plus = 0.5;
  DetectorModel detector{0.55, 0.0, 0.996};
  HomodyneModel homodyne{0.858, 0.005};
  DisplacementPolicy policy = DisplacementPolicy::optimize;
  double transmittance = 1.0;
  double beta = 0.0;
  double gamma2 = 24.7;
  bool engine_analytic = true;
  bool engine_monte_carlo = false;
  Mode mode = Mode::ideal;
  std::uint64_t trials = 1'000'000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<GridSpec> beta2_grid;  // unset selects the default grid
  GridSpec gamma2_grid{1.0, 101.0, 26};
  Receiver crossover_first = Receiver::kennedy;
  Receiver crossover_second = Receiver::homodyne;
  double crossover_lo = 0.05;
  double crossover_hi = 2.0;
  std::string out;  // output base path; empty selects the command default
  std::string format = "text";  // stdout rendering: text | csv | json
};

// Strict parse: unknown or mistyped keys raise ConfigError naming the key.
// Accepts either a bare config object or a previously written output
// document (the config is then taken from its provenance block).
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config_file(const std::string& path);

// Cross-field checks shared by all commands; commands that sample also
// demand an explicit seed so no run is silently nondeterministic.
void validate_config(const RunConfig& config, bool needs_seed);

EngineOptions engine_options(const RunConfig& config);

nlohmann::json sweep_to_json(const SweepResult& result);

// Output document: payload plus a provenance block with tool name,
// version, command and the effective config. Deliberately no timestamps
// or host details, so reruns are byte-identical.
nlohmann::json make_output_document(const std::string& command,
                                    const RunConfig& config,
                                    nlohmann::json payload);

std::string document_to_text(const nlohmann::json& doc);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace csd
