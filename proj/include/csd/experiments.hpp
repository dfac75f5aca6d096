#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csd/pulse_sim.hpp"
#include "csd/receivers.hpp"
#include "csd/solver.hpp"

namespace csd {

// In "ideal" mode the amplitude axis is the physical mean photon number at
// the receiver input. In "corrected" mode the axis is the detected
// (efficiency-referred) mean photon number: each receiver is evaluated at
// the physical amplitude axis_value / efficiency of its own detection
// chain, which puts receivers with different efficiencies on a common
// axis.
enum class Mode { ideal, corrected };

enum class Receiver { helstrom, kennedy, homodyne, displacement_opt };

std::string to_string(Mode mode);
std::string to_string(Receiver receiver);
Mode mode_from_string(const std::string& name);
Receiver receiver_from_string(const std::string& name);

struct SweepSeries {
  std::string name;
  std::vector<double> values;
};

struct SweepResult {
  std::string axis_name;
  std::vector<double> axis_values;
  std::vector<SweepSeries> series;
  std::map<std::string, double> annotations;
  std::vector<std::string> warnings;

  const SweepSeries* find(const std::string& name) const;
};

struct EngineOptions {
  bool analytic = true;
  bool monte_carlo = false;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct AmplitudeSweepOptions {
  std::vector<double> alpha2_grid;
  DetectorModel detector;
  HomodyneModel homodyne;
  Mode mode = Mode::ideal;
  std::vector<Receiver> receivers = {Receiver::helstrom, Receiver::kennedy,
                                     Receiver::homodyne,
                                     Receiver::displacement_opt};
  EngineOptions engine;
};

// Error probability versus mean photon number for the selected receivers.
// Monte Carlo runs (when enabled) add "<name>_mc" and "<name>_mc_stderr"
// series for every receiver that has a sampled counterpart; the quantum
// bound has none and stays analytic.
SweepResult amplitude_sweep(const AmplitudeSweepOptions& options);

struct BetaSweepOptions {
  double alpha2 = 0.16;
  DetectorModel detector;
  std::vector<double> beta2_grid;  // empty selects the default grid
  double transmittance = 1.0;
  // When set, the auxiliary amplitude is held fixed instead of the
  // transmittance: each grid point uses T = 1 - beta^2 / gamma2.
  std::optional<double> gamma2;
  EngineOptions engine;
};

// Error probability versus displacement strength at fixed signal
// amplitude. Annotates the matched-displacement point (beta^2 = alpha2),
// the solver optimum, and the grid argmin; a mismatch between the last two
// beyond one grid step is reported as a warning.
SweepResult beta_sweep(const BetaSweepOptions& options);

struct GammaSweepOptions {
  double alpha2 = 0.16;
  DetectorModel detector;
  std::vector<double> gamma2_grid;
};

// Optimized transmittance, displacement and error versus the auxiliary
// oscillator strength. Grid points where gamma2 coincides with alpha2 are
// skipped with a warning (the stationarity condition is singular there).
SweepResult gamma_sweep(const GammaSweepOptions& options);

struct CrossoverOptions {
  Receiver first = Receiver::kennedy;
  Receiver second = Receiver::homodyne;
  double bracket_lo = 0.05;
  double bracket_hi = 2.0;
  DetectorModel detector;
  HomodyneModel homodyne;
  double tol = 1e-6;
};

// Mean photon number where the two receivers' analytic error curves
// intersect. The difference must change sign across the bracket; receivers
// that never cross there (or a receiver against itself) raise a
// no-sign-change error.
double crossover_find(const CrossoverOptions& options);

// Analytic error of one receiver at one physical mean photon number, with
// the displacement receivers taking their detector imperfections into
// account (and the optimized one re-solving its displacement).
double receiver_error(Receiver receiver, double alpha2,
                      const DetectorModel& detector,
                      const HomodyneModel& homodyne);

// Shannon mutual information (bits per pulse) of the binary symmetric
// channel induced by deciding with error probability p at equal priors.
double mutual_information(double p_error);

std::vector<double> linspace(double lo, double hi, std::size_t points);

// 50 evenly spaced beta^2 points on [0, 4 * max(0.25, alpha2)].
std::vector<double> default_beta2_grid(double alpha2);

// Header row then one line per axis value; full round-trip precision,
// locale-independent.
std::string sweep_to_csv(const SweepResult& result);

}  // namespace csd
