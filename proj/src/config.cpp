#include "csd/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "csd/errors.hpp"
#include "csd/version.hpp"

namespace csd {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (item.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown config key \"" + prefix + item.key() + "\"");
    }
  }
}

const json* maybe(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double read_double(const json& obj, const std::string& prefix,
                   const char* key, double fallback) {
  const json* v = maybe(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) {
    throw ConfigError("config key \"" + prefix + key +
                      "\" must be a number");
  }
  return v->get<double>();
}

std::uint64_t read_uint(const json& obj, const std::string& prefix,
                        const char* key, std::uint64_t fallback) {
  const json* v = maybe(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_unsigned() &&
      !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
    throw ConfigError("config key \"" + prefix + key +
                      "\" must be a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

std::string read_string(const json& obj, const std::string& prefix,
                        const char* key, const std::string& fallback) {
  const json* v = maybe(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) {
    throw ConfigError("config key \"" + prefix + key +
                      "\" must be a string");
  }
  return v->get<std::string>();
}

GridSpec read_grid(const json& v, const std::string& path,
                   const GridSpec& fallback) {
  if (!v.is_object()) {
    throw ConfigError("config key \"" + path +
                      "\" must be an object with min/max/points");
  }
  check_keys(v, path + ".", {"min", "max", "points"});
  GridSpec g = fallback;
  g.min = read_double(v, path + ".", "min", fallback.min);
  g.max = read_double(v, path + ".", "max", fallback.max);
  g.points = static_cast<std::size_t>(
      read_uint(v, path + ".", "points", fallback.points));
  return g;
}

void require_cfg(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_grid_spec(const GridSpec& g, const std::string& path,
                     double min_allowed) {
  require_cfg(std::isfinite(g.min) && std::isfinite(g.max),
              "config key \"" + path + "\" must have finite bounds");
  require_cfg(g.min >= min_allowed,
              "config key \"" + path + ".min\" must be >= " +
                  std::to_string(min_allowed));
  require_cfg(g.min <= g.max,
              "config key \"" + path + ".min\" must not exceed \"" + path +
                  ".max\"");
  require_cfg(g.points >= 1,
              "config key \"" + path + ".points\" must be >= 1");
}

json grid_to_json(const GridSpec& g) {
  return json{{"min", g.min}, {"max", g.max}, {"points", g.points}};
}

}  // namespace

std::string to_string(DisplacementPolicy policy) {
  switch (policy) {
    case DisplacementPolicy::fixed_beta: return "fixed_beta";
    case DisplacementPolicy::fixed_gamma: return "fixed_gamma";
    case DisplacementPolicy::optimize: return "optimize";
  }
  throw DomainError("unknown displacement policy");
}

DisplacementPolicy policy_from_string(const std::string& name) {
  if (name == "fixed_beta") return DisplacementPolicy::fixed_beta;
  if (name == "fixed_gamma") return DisplacementPolicy::fixed_gamma;
  if (name == "optimize") return DisplacementPolicy::optimize;
  throw ConfigError("unknown displacement policy \"" + name + "\"");
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  // A previously written output document carries its effective config in
  // the provenance block; accept it directly so outputs are re-runnable.
  if (const json* prov = maybe(j, "provenance")) {
    if (!prov->is_object() || !prov->contains("config")) {
      throw ConfigError("provenance block has no \"config\" member");
    }
    return config_from_json(prov->at("config"));
  }

  check_keys(j, "",
             {"alpha2", "alpha2_grid", "prior_plus", "detector", "homodyne",
              "displacement", "engine", "mode", "trials", "seed", "workers",
              "beta2_grid", "gamma2_grid", "crossover", "out", "format"});
  RunConfig cfg;
  cfg.alpha2 = read_double(j, "", "alpha2", cfg.alpha2);
  if (const json* v = maybe(j, "alpha2_grid")) {
    cfg.alpha2_grid = read_grid(*v, "alpha2_grid", cfg.alpha2_grid);
  }
  cfg.prior_plus = read_double(j, "", "prior_plus", cfg.prior_plus);
  if (const json* v = maybe(j, "detector")) {
    if (!v->is_object()) {
      throw ConfigError("config key \"detector\" must be an object");
    }
    check_keys(*v, "detector.", {"eta", "nu", "xi"});
    cfg.detector.eta = read_double(*v, "detector.", "eta", cfg.detector.eta);
    cfg.detector.nu = read_double(*v, "detector.", "nu", cfg.detector.nu);
    cfg.detector.xi = read_double(*v, "detector.", "xi", cfg.detector.xi);
  }
  if (const json* v = maybe(j, "homodyne")) {
    if (!v->is_object()) {
      throw ConfigError("config key \"homodyne\" must be an object");
    }
    check_keys(*v, "homodyne.", {"efficiency", "excess_noise"});
    cfg.homodyne.efficiency =
        read_double(*v, "homodyne.", "efficiency", cfg.homodyne.efficiency);
    cfg.homodyne.excess_noise = read_double(*v, "homodyne.", "excess_noise",
                                            cfg.homodyne.excess_noise);
  }
  if (const json* v = maybe(j, "displacement")) {
    if (!v->is_object()) {
      throw ConfigError("config key \"displacement\" must be an object");
    }
    check_keys(*v, "displacement.",
               {"policy", "transmittance", "beta", "gamma2"});
    cfg.policy = policy_from_string(read_string(
        *v, "displacement.", "policy", to_string(cfg.policy)));
    cfg.transmittance = read_double(*v, "displacement.", "transmittance",
                                    cfg.transmittance);
    cfg.beta = read_double(*v, "displacement.", "beta", cfg.beta);
    cfg.gamma2 = read_double(*v, "displacement.", "gamma2", cfg.gamma2);
  }
  const std::string engine = read_string(j, "", "engine", "analytic");
  if (engine == "analytic") {
    cfg.engine_analytic = true;
    cfg.engine_monte_carlo = false;
  } else if (engine == "montecarlo") {
    cfg.engine_analytic = false;
    cfg.engine_monte_carlo = true;
  } else if (engine == "both") {
    cfg.engine_analytic = true;
    cfg.engine_monte_carlo = true;
  } else {
    throw ConfigError(
        "config key \"engine\" must be analytic, montecarlo or both");
  }
  try {
    cfg.mode = mode_from_string(read_string(j, "", "mode", "ideal"));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config key \"mode\": ") + e.what());
  }
  cfg.trials = read_uint(j, "", "trials", cfg.trials);
  if (const json* v = maybe(j, "seed")) {
    (void)v;
    cfg.seed = read_uint(j, "", "seed", 0);
  }
  cfg.workers =
      static_cast<unsigned>(read_uint(j, "", "workers", cfg.workers));
  if (const json* v = maybe(j, "beta2_grid")) {
    cfg.beta2_grid = read_grid(*v, "beta2_grid", GridSpec{0.0, 1.0, 50});
  }
  if (const json* v = maybe(j, "gamma2_grid")) {
    cfg.gamma2_grid = read_grid(*v, "gamma2_grid", cfg.gamma2_grid);
  }
  if (const json* v = maybe(j, "crossover")) {
    if (!v->is_object()) {
      throw ConfigError("config key \"crossover\" must be an object");
    }
    check_keys(*v, "crossover.", {"first", "second", "bracket"});
    try {
      cfg.crossover_first = receiver_from_string(read_string(
          *v, "crossover.", "first", to_string(cfg.crossover_first)));
      cfg.crossover_second = receiver_from_string(read_string(
          *v, "crossover.", "second", to_string(cfg.crossover_second)));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config key \"crossover\": ") + e.what());
    }
    if (const json* b = maybe(*v, "bracket")) {
      if (!b->is_array() || b->size() != 2 || !(*b)[0].is_number() ||
          !(*b)[1].is_number()) {
        throw ConfigError(
            "config key \"crossover.bracket\" must be [lo, hi]");
      }
      cfg.crossover_lo = (*b)[0].get<double>();
      cfg.crossover_hi = (*b)[1].get<double>();
    }
  }
  cfg.out = read_string(j, "", "out", cfg.out);
  cfg.format = read_string(j, "", "format", cfg.format);
  return cfg;
}

nlohmann::json config_to_json(const RunConfig& config) {
  json j;
  j["alpha2"] = config.alpha2;
  j["alpha2_grid"] = grid_to_json(config.alpha2_grid);
  j["prior_plus"] = config.prior_plus;
  j["detector"] = json{{"eta", config.detector.eta},
                       {"nu", config.detector.nu},
                       {"xi", config.detector.xi}};
  j["homodyne"] = json{{"efficiency", config.homodyne.efficiency},
                       {"excess_noise", config.homodyne.excess_noise}};
  j["displacement"] = json{{"policy", to_string(config.policy)},
                           {"transmittance", config.transmittance},
                           {"beta", config.beta},
                           {"gamma2", config.gamma2}};
  j["engine"] = config.engine_monte_carlo
                    ? (config.engine_analytic ? "both" : "montecarlo")
                    : "analytic";
  j["mode"] = to_string(config.mode);
  j["trials"] = config.trials;
  if (config.seed) j["seed"] = *config.seed;
  j["workers"] = config.workers;
  if (config.beta2_grid) j["beta2_grid"] = grid_to_json(*config.beta2_grid);
  j["gamma2_grid"] = grid_to_json(config.gamma2_grid);
  j["crossover"] =
      json{{"first", to_string(config.crossover_first)},
           {"second", to_string(config.crossover_second)},
           {"bracket", json::array({config.crossover_lo, config.crossover_hi})}};
  j["out"] = config.out;
  j["format"] = config.format;
  return j;
}

RunConfig load_config_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " +
                      e.what());
  }
  return config_from_json(j);
}

void validate_config(const RunConfig& config, bool needs_seed) {
  require_cfg(std::isfinite(config.alpha2) && config.alpha2 >= 0.0,
              "config key \"alpha2\" must be finite and >= 0");
  check_grid_spec(config.alpha2_grid, "alpha2_grid", 0.0);
  require_cfg(std::abs(config.prior_plus - 0.5) <= 1e-12,
              "config key \"prior_plus\" must be 0.5: the closed-form "
              "receiver errors are stated for equal priors");
  require_cfg(std::isfinite(config.detector.eta) &&
                  config.detector.eta >= 0.0 && config.detector.eta <= 1.0,
              "config key \"detector.eta\" must lie in [0, 1]");
  require_cfg(std::isfinite(config.detector.nu) && config.detector.nu >= 0.0,
              "config key \"detector.nu\" must be finite and >= 0");
  require_cfg(std::isfinite(config.detector.xi) &&
                  config.detector.xi >= 0.0 && config.detector.xi <= 1.0,
              "config key \"detector.xi\" must lie in [0, 1]");
  require_cfg(std::isfinite(config.homodyne.efficiency) &&
                  config.homodyne.efficiency >= 0.0 &&
                  config.homodyne.efficiency <= 1.0,
              "config key \"homodyne.efficiency\" must lie in [0, 1]");
  require_cfg(std::isfinite(config.homodyne.excess_noise) &&
                  config.homodyne.excess_noise >= 0.0,
              "config key \"homodyne.excess_noise\" must be finite and >= 0");
  require_cfg(std::isfinite(config.transmittance) &&
                  config.transmittance > 0.0 && config.transmittance <= 1.0,
              "config key \"displacement.transmittance\" must lie in (0, 1]");
  require_cfg(std::isfinite(config.beta) && config.beta >= 0.0,
              "config key \"displacement.beta\" must be finite and >= 0");
  require_cfg(std::isfinite(config.gamma2) && config.gamma2 > 0.0,
              "config key \"displacement.gamma2\" must be > 0");
  require_cfg(config.workers >= 1, "config key \"workers\" must be >= 1");
  if (config.engine_monte_carlo) {
    require_cfg(config.trials >= 1,
                "config key \"trials\" must be >= 1 for Monte Carlo runs");
  }
  if (config.beta2_grid) {
    check_grid_spec(*config.beta2_grid, "beta2_grid", 0.0);
  }
  check_grid_spec(config.gamma2_grid, "gamma2_grid", 0.0);
  require_cfg(config.gamma2_grid.min > 0.0,
              "config key \"gamma2_grid.min\" must be > 0");
  require_cfg(std::isfinite(config.crossover_lo) &&
                  std::isfinite(config.crossover_hi) &&
                  config.crossover_lo >= 0.0 &&
                  config.crossover_lo < config.crossover_hi,
              "config key \"crossover.bracket\" must satisfy 0 <= lo < hi");
  require_cfg(config.format == "text" || config.format == "csv" ||
                  config.format == "json",
              "config key \"format\" must be text, csv or json");
  if (config.mode == Mode::corrected) {
    require_cfg(config.detector.eta > 0.0 && config.homodyne.efficiency > 0.0,
                "corrected mode needs \"detector.eta\" and "
                "\"homodyne.efficiency\" to be > 0");
  }
  if (needs_seed) {
    require_cfg(config.seed.has_value(),
                "config key \"seed\" is required whenever results are "
                "sampled; pick one to make the run reproducible");
  }
}

EngineOptions engine_options(const RunConfig& config) {
  EngineOptions e;
  e.analytic = config.engine_analytic;
  e.monte_carlo = config.engine_monte_carlo;
  e.trials = config.trials;
  e.seed = config.seed.value_or(0);
  e.workers = config.workers;
  return e;
}

nlohmann::json sweep_to_json(const SweepResult& result) {
  json axis;
  axis["name"] = result.axis_name;
  axis["values"] = result.axis_values;
  json series = json::array();
  for (const SweepSeries& s : result.series) {
    series.push_back(json{{"name", s.name}, {"values", s.values}});
  }
  json out;
  out["axis"] = std::move(axis);
  out["series"] = std::move(series);
  out["annotations"] = result.annotations;
  out["warnings"] = result.warnings;
  return out;
}

nlohmann::json make_output_document(const std::string& command,
                                    const RunConfig& config,
                                    nlohmann::json payload) {
  json doc = std::move(payload);
  doc["provenance"] = json{{"tool", "csd"},
                           {"version", kVersionString},
                           {"command", command},
                           {"config", config_to_json(config)}};
  return doc;
}

std::string document_to_text(const nlohmann::json& doc) {
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) {
    throw IoError("failed while writing " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path + " for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed while reading " + path);
  }
  return buffer.str();
}

}  // namespace csd
