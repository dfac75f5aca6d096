#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csd/config.hpp"
#include "csd/errors.hpp"
#include "csd/experiments.hpp"
#include "csd/pulse_sim.hpp"
#include "csd/receivers.hpp"
#include "csd/solver.hpp"
#include "csd/version.hpp"

namespace {

using csd::RunConfig;
using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::optional<double> alpha2;
  std::optional<double> eta;
  std::optional<double> nu;
  std::optional<double> xi;
  std::optional<double> eta_hd;
  std::optional<double> excess_noise;
  std::optional<double> prior_plus;
  std::optional<double> gamma2;
  std::optional<double> beta;
  std::optional<double> transmittance;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> mode;
  std::optional<std::string> engine;
  std::optional<std::string> policy;
  std::optional<std::string> first;
  std::optional<std::string> second;
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<std::uint64_t> points;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file, or a previous output document whose "
                  "provenance block will be reused");
  cmd->add_option("--alpha2", o.alpha2, "signal mean photon number");
  cmd->add_option("--eta", o.eta, "photon counter quantum efficiency");
  cmd->add_option("--nu", o.nu, "mean dark counts per gate");
  cmd->add_option("--xi", o.xi, "interference visibility");
  cmd->add_option("--eta-hd", o.eta_hd, "homodyne detection efficiency");
  cmd->add_option("--excess-noise", o.excess_noise,
                  "homodyne excess noise relative to shot noise");
  cmd->add_option("--prior-plus", o.prior_plus,
                  "prior of the +alpha hypothesis");
  cmd->add_option("--gamma2", o.gamma2,
                  "auxiliary oscillator mean photon number");
  cmd->add_option("--beta", o.beta, "fixed displacement amplitude");
  cmd->add_option("--transmittance", o.transmittance,
                  "beam splitter power transmittance");
  cmd->add_option("--policy", o.policy,
                  "displacement policy: fixed_beta, fixed_gamma or optimize");
  cmd->add_option("--engine", o.engine,
                  "evaluation engine: analytic, montecarlo or both");
  cmd->add_option("--mode", o.mode, "amplitude axis: ideal or corrected");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--seed", o.seed, "RNG seed (required when sampling)");
  cmd->add_option("--workers", o.workers, "simulation worker threads");
  cmd->add_option("--first", o.first, "first receiver of a crossover pair");
  cmd->add_option("--second", o.second,
                  "second receiver of a crossover pair");
  cmd->add_option("--bracket-lo", o.bracket_lo,
                  "lower end of the crossover bracket");
  cmd->add_option("--bracket-hi", o.bracket_hi,
                  "upper end of the crossover bracket");
  cmd->add_option("--grid-min", o.grid_min, "sweep grid lower bound");
  cmd->add_option("--grid-max", o.grid_max, "sweep grid upper bound");
  cmd->add_option("--points", o.points, "sweep grid point count");
  cmd->add_option("--out", o.out, "output base path (without extension)");
  cmd->add_option("--format", o.format, "stdout format: text, csv or json");
}

void apply_overrides(RunConfig& cfg, const Overrides& o,
                     const std::string& cmd) {
  if (o.alpha2) cfg.alpha2 = *o.alpha2;
  if (o.eta) cfg.detector.eta = *o.eta;
  if (o.nu) cfg.detector.nu = *o.nu;
  if (o.xi) cfg.detector.xi = *o.xi;
  if (o.eta_hd) cfg.homodyne.efficiency = *o.eta_hd;
  if (o.excess_noise) cfg.homodyne.excess_noise = *o.excess_noise;
  if (o.prior_plus) cfg.prior_plus = *o.prior_plus;
  if (o.gamma2) cfg.gamma2 = *o.gamma2;
  if (o.beta) cfg.beta = *o.beta;
  if (o.transmittance) cfg.transmittance = *o.transmittance;
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  try {
    if (o.mode) cfg.mode = csd::mode_from_string(*o.mode);
    if (o.first) cfg.crossover_first = csd::receiver_from_string(*o.first);
    if (o.second) cfg.crossover_second = csd::receiver_from_string(*o.second);
  } catch (const csd::DomainError& e) {
    throw csd::ConfigError(e.what());
  }
  if (o.policy) cfg.policy = csd::policy_from_string(*o.policy);
  if (o.engine) {
    if (*o.engine == "analytic") {
      cfg.engine_analytic = true;
      cfg.engine_monte_carlo = false;
    } else if (*o.engine == "montecarlo") {
      cfg.engine_analytic = false;
      cfg.engine_monte_carlo = true;
    } else if (*o.engine == "both") {
      cfg.engine_analytic = true;
      cfg.engine_monte_carlo = true;
    } else {
      throw csd::ConfigError(
          "--engine must be analytic, montecarlo or both");
    }
  }
  if (o.bracket_lo) cfg.crossover_lo = *o.bracket_lo;
  if (o.bracket_hi) cfg.crossover_hi = *o.bracket_hi;
  if (o.out) cfg.out = *o.out;
  if (o.format) cfg.format = *o.format;
  if (o.grid_min || o.grid_max || o.points) {
    csd::GridSpec* grid = nullptr;
    if (cmd == "compare") {
      grid = &cfg.alpha2_grid;
    } else if (cmd == "sweep-gamma") {
      grid = &cfg.gamma2_grid;
    } else if (cmd == "sweep-beta") {
      if (!cfg.beta2_grid) {
        cfg.beta2_grid =
            csd::GridSpec{0.0, 4.0 * std::max(0.25, cfg.alpha2), 50};
      }
      grid = &*cfg.beta2_grid;
    } else {
      throw csd::ConfigError(
          "--grid-min/--grid-max/--points apply only to sweep commands");
    }
    if (o.grid_min) grid->min = *o.grid_min;
    if (o.grid_max) grid->max = *o.grid_max;
    if (o.points) grid->points = static_cast<std::size_t>(*o.points);
  }
}

std::string output_base(const RunConfig& cfg, const char* fallback) {
  return cfg.out.empty() ? std::string(fallback) : cfg.out;
}

void print_annotations(const csd::SweepResult& result) {
  for (const auto& [name, value] : result.annotations) {
    std::printf("  %s = %.12g\n", name.c_str(), value);
  }
  for (const std::string& w : result.warnings) {
    std::printf("warning: %s\n", w.c_str());
  }
}

void emit_sweep(const std::string& command, const RunConfig& cfg,
                const csd::SweepResult& result, const char* base_fallback) {
  const std::string base = output_base(cfg, base_fallback);
  const std::string csv = csd::sweep_to_csv(result);
  const json doc =
      csd::make_output_document(command, cfg, csd::sweep_to_json(result));
  csd::write_text_file(base + ".csv", csv);
  csd::write_text_file(base + ".json", csd::document_to_text(doc));
  if (cfg.format == "csv") {
    std::fputs(csv.c_str(), stdout);
  } else if (cfg.format == "json") {
    std::fputs(csd::document_to_text(doc).c_str(), stdout);
  } else {
    std::printf("%s: %zu axis points, %zu series\n", command.c_str(),
                result.axis_values.size(), result.series.size());
    print_annotations(result);
    std::printf("wrote %s.csv\nwrote %s.json\n", base.c_str(), base.c_str());
  }
}

json estimate_to_json(const csd::ErrorEstimate& est, double analytic) {
  return json{{"p_hat", est.p_hat},
              {"trials", est.trials},
              {"std_err", est.std_err},
              {"analytic", analytic}};
}

// Resolve the displacement stage for the single-point commands from the
// configured policy, re-running the relevant optimizer when asked to.
csd::DisplacementSetup resolve_setup(const RunConfig& cfg,
                                     const csd::DiscriminationProblem& problem) {
  switch (cfg.policy) {
    case csd::DisplacementPolicy::fixed_beta:
      return csd::DisplacementSetup{cfg.transmittance, cfg.beta};
    case csd::DisplacementPolicy::fixed_gamma: {
      const csd::RootResult rt = csd::optimal_transmittance(
          problem, cfg.detector, std::sqrt(cfg.gamma2));
      return csd::DisplacementSetup::from_gamma(rt.root,
                                                std::sqrt(cfg.gamma2));
    }
    case csd::DisplacementPolicy::optimize: {
      const csd::RootResult rb =
          csd::optimal_beta(problem, cfg.detector, cfg.transmittance);
      return csd::DisplacementSetup{cfg.transmittance, rb.root};
    }
  }
  throw csd::ConfigError("unknown displacement policy");
}

void run_compare(const RunConfig& cfg) {
  csd::AmplitudeSweepOptions options;
  options.alpha2_grid = cfg.alpha2_grid.values();
  options.detector = cfg.detector;
  options.homodyne = cfg.homodyne;
  options.mode = cfg.mode;
  options.engine = csd::engine_options(cfg);
  emit_sweep("compare", cfg, csd::amplitude_sweep(options), "compare");
}

void run_sweep_beta(const RunConfig& cfg) {
  csd::BetaSweepOptions options;
  options.alpha2 = cfg.alpha2;
  options.detector = cfg.detector;
  if (cfg.beta2_grid) options.beta2_grid = cfg.beta2_grid->values();
  options.transmittance = cfg.transmittance;
  if (cfg.policy == csd::DisplacementPolicy::fixed_gamma) {
    options.gamma2 = cfg.gamma2;
  }
  options.engine = csd::engine_options(cfg);
  emit_sweep("sweep-beta", cfg, csd::beta_sweep(options), "beta_sweep");
}

void run_sweep_gamma(const RunConfig& cfg) {
  csd::GammaSweepOptions options;
  options.alpha2 = cfg.alpha2;
  options.detector = cfg.detector;
  options.gamma2_grid = cfg.gamma2_grid.values();
  emit_sweep("sweep-gamma", cfg, csd::gamma_sweep(options), "gamma_sweep");
}

void run_optimize(const RunConfig& cfg) {
  const auto problem =
      csd::DiscriminationProblem::from_mean_photon_number(cfg.alpha2);
  json payload;
  double error = 0.0;
  if (cfg.policy == csd::DisplacementPolicy::fixed_gamma) {
    const csd::RootResult rt = csd::optimal_transmittance(
        problem, cfg.detector, std::sqrt(cfg.gamma2));
    const auto setup =
        csd::DisplacementSetup::from_gamma(rt.root, std::sqrt(cfg.gamma2));
    error = csd::displacement_error(problem, cfg.detector, setup).value;
    payload["gamma2"] = cfg.gamma2;
    payload["t_opt"] = rt.root;
    payload["beta_opt"] = setup.beta;
    payload["beta2_opt"] = setup.beta * setup.beta;
    payload["residual"] = rt.residual;
    payload["iterations"] = rt.iterations;
  } else {
    const csd::RootResult rb =
        csd::optimal_beta(problem, cfg.detector, cfg.transmittance);
    const csd::DisplacementSetup setup{cfg.transmittance, rb.root};
    error = csd::displacement_error(problem, cfg.detector, setup).value;
    payload["transmittance"] = cfg.transmittance;
    payload["beta_opt"] = rb.root;
    payload["beta2_opt"] = rb.root * rb.root;
    payload["residual"] = rb.residual;
    payload["iterations"] = rb.iterations;
  }
  payload["error"] = error;
  payload["mutual_information"] = csd::mutual_information(error);

  const json doc = csd::make_output_document("optimize", cfg, payload);
  if (!cfg.out.empty()) {
    csd::write_text_file(cfg.out + ".json", csd::document_to_text(doc));
  }
  if (cfg.format == "json") {
    std::fputs(csd::document_to_text(doc).c_str(), stdout);
  } else {
    std::printf("optimize: alpha2 = %.12g\n", cfg.alpha2);
    if (payload.contains("t_opt")) {
      std::printf("  t_opt = %.12g (gamma2 = %.12g)\n",
                  payload["t_opt"].get<double>(), cfg.gamma2);
    }
    std::printf("  beta_opt = %.12g (beta2 = %.12g)\n",
                payload["beta_opt"].get<double>(),
                payload["beta2_opt"].get<double>());
    std::printf("  residual = %.3g after %d iterations\n",
                payload["residual"].get<double>(),
                payload["iterations"].get<int>());
    std::printf("  error = %.12g, mutual information = %.12g bits\n", error,
                payload["mutual_information"].get<double>());
    if (!cfg.out.empty()) std::printf("wrote %s.json\n", cfg.out.c_str());
  }
}

void run_simulate(const RunConfig& cfg) {
  if (cfg.trials == 0) {
    throw csd::ConfigError("config key \"trials\" must be >= 1 to simulate");
  }
  const auto problem =
      csd::DiscriminationProblem::from_mean_photon_number(cfg.alpha2);
  const csd::DisplacementSetup setup = resolve_setup(cfg, problem);
  csd::SimOptions sim;
  sim.trials = cfg.trials;
  sim.seed = *cfg.seed;
  sim.workers = cfg.workers;
  const std::vector<csd::PulseRecord> log =
      csd::generate_pulse_log(problem, cfg.detector, setup, cfg.homodyne, sim);
  const csd::LogSummary summary = csd::aggregate_pulse_log(log);
  const double apd_analytic =
      csd::displacement_error(problem, cfg.detector, setup).value;
  const double hd_analytic =
      csd::homodyne_error_model(problem, cfg.homodyne).value;

  json payload;
  payload["setup"] =
      json{{"transmittance", setup.transmittance}, {"beta", setup.beta}};
  payload["apd"] = estimate_to_json(summary.apd, apd_analytic);
  payload["homodyne"] = estimate_to_json(summary.homodyne, hd_analytic);

  const std::string base = output_base(cfg, "pulse_log");
  std::ostringstream csv;
  csd::write_pulse_log_csv(csv, log);
  csd::write_text_file(base + ".csv", csv.str());
  const json doc = csd::make_output_document("simulate", cfg, payload);
  csd::write_text_file(base + ".json", csd::document_to_text(doc));

  if (cfg.format == "json") {
    std::fputs(csd::document_to_text(doc).c_str(), stdout);
  } else {
    std::printf("simulate: %llu pulses, T = %.12g, beta = %.12g\n",
                static_cast<unsigned long long>(cfg.trials),
                setup.transmittance, setup.beta);
    std::printf("  photon counting: p_hat = %.6g +- %.3g (analytic %.6g)\n",
                summary.apd.p_hat, summary.apd.std_err, apd_analytic);
    std::printf("  homodyne:        p_hat = %.6g +- %.3g (analytic %.6g)\n",
                summary.homodyne.p_hat, summary.homodyne.std_err,
                hd_analytic);
    std::printf("wrote %s.csv\nwrote %s.json\n", base.c_str(), base.c_str());
  }
}

void run_crossover(const RunConfig& cfg) {
  csd::CrossoverOptions options;
  options.first = cfg.crossover_first;
  options.second = cfg.crossover_second;
  options.bracket_lo = cfg.crossover_lo;
  options.bracket_hi = cfg.crossover_hi;
  options.detector = cfg.detector;
  options.homodyne = cfg.homodyne;
  const double cross = csd::crossover_find(options);
  const double first_error = csd::receiver_error(
      options.first, cross, cfg.detector, cfg.homodyne);
  const double second_error = csd::receiver_error(
      options.second, cross, cfg.detector, cfg.homodyne);

  json payload;
  payload["first"] = csd::to_string(options.first);
  payload["second"] = csd::to_string(options.second);
  payload["alpha2_cross"] = cross;
  payload["error_first"] = first_error;
  payload["error_second"] = second_error;
  const json doc = csd::make_output_document("crossover", cfg, payload);
  if (!cfg.out.empty()) {
    csd::write_text_file(cfg.out + ".json", csd::document_to_text(doc));
  }
  if (cfg.format == "json") {
    std::fputs(csd::document_to_text(doc).c_str(), stdout);
  } else {
    std::printf("crossover of %s and %s: alpha2 = %.12g\n",
                csd::to_string(options.first).c_str(),
                csd::to_string(options.second).c_str(), cross);
    std::printf("  error there: %.12g vs %.12g\n", first_error,
                second_error);
    if (!cfg.out.empty()) std::printf("wrote %s.json\n", cfg.out.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary coherent-state discrimination: analytic receiver "
               "errors, displacement optimization and pulse-level "
               "simulation"};
  app.set_version_flag("--version", csd::kVersionString);
  app.require_subcommand(1);
  Overrides o;
  add_common_flags(
      app.add_subcommand("compare", "all receivers across the amplitude grid"),
      o);
  add_common_flags(
      app.add_subcommand("sweep-beta",
                         "error versus displacement strength at fixed alpha2"),
      o);
  add_common_flags(
      app.add_subcommand("sweep-gamma",
                         "optimized error versus auxiliary oscillator "
                         "strength"),
      o);
  add_common_flags(
      app.add_subcommand("optimize",
                         "solve the displacement optimality conditions"),
      o);
  add_common_flags(
      app.add_subcommand("simulate", "per-pulse Monte Carlo log and summary"),
      o);
  add_common_flags(
      app.add_subcommand("crossover",
                         "amplitude where two receiver curves intersect"),
      o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = csd::load_config_file(o.config_path);
    apply_overrides(cfg, o, cmd);
    const bool needs_seed = cmd == "simulate" || cfg.engine_monte_carlo;
    csd::validate_config(cfg, needs_seed);

    if (cmd == "compare") {
      run_compare(cfg);
    } else if (cmd == "sweep-beta") {
      run_sweep_beta(cfg);
    } else if (cmd == "sweep-gamma") {
      run_sweep_gamma(cfg);
    } else if (cmd == "optimize") {
      run_optimize(cfg);
    } else if (cmd == "simulate") {
      run_simulate(cfg);
    } else if (cmd == "crossover") {
      run_crossover(cfg);
    }
    return 0;
  } catch (const csd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const csd::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const csd::InternalConsistencyError& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
