#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "csd/receivers.hpp"

namespace csd {

// Homodyne chain: detection efficiency and excess noise relative to shot
// noise. Quadratures use the convention Var(x) = 1/4 for the vacuum, so a
// signal pulse gives x ~ N(+-sqrt(efficiency) * alpha, (1 + excess) / 4).
struct HomodyneModel {
  double efficiency = 1.0;
  double excess_noise = 0.0;

  static HomodyneModel ideal() { return {}; }
};

void validate(const HomodyneModel& model);

// Closed-form error of the sampled homodyne model; reduces to
// homodyne_error for the ideal chain.
ErrorProbability homodyne_error_model(const DiscriminationProblem& problem,
                                      const HomodyneModel& model);

struct PulseRecord {
  std::int8_t hypothesis;         // +1 for |+alpha>, -1 for |-alpha>
  std::uint32_t apd_counts;       // Poissonian photon counts in the gate
  double quadrature;              // homodyne outcome for the same pulse
  std::int8_t decision_apd;       // +1 iff apd_counts > 0
  std::int8_t decision_homodyne;  // +1 iff quadrature > 0
};

struct ErrorEstimate {
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  double std_err = 0.0;  // binomial, sqrt(p_hat (1 - p_hat) / trials)
};

ErrorEstimate make_error_estimate(std::uint64_t wrong, std::uint64_t trials);

// Trials are processed in fixed-size chunks; each chunk draws from RNG
// streams keyed on (seed, chunk index) only. Results are therefore
// identical for any worker count, and the hypothesis stream is shared by
// every simulator so the same (seed, trial) always sees the same state.
struct SimOptions {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint32_t chunk_size = 1u << 16;
};

void validate(const SimOptions& options);

// Displaced photon counting: Poissonian counts with the per-hypothesis
// detected means, decision "+" on at least one count.
ErrorEstimate simulate_apd_sequence(const DiscriminationProblem& problem,
                                    const DetectorModel& detector,
                                    const DisplacementSetup& setup,
                                    const SimOptions& options);

// Homodyne detection: Gaussian quadrature, decision "+" on x > 0.
ErrorEstimate simulate_homodyne_sequence(const DiscriminationProblem& problem,
                                         const HomodyneModel& model,
                                         const SimOptions& options);

// Per-pulse log with both detectors applied to one hypothesis draw, as in
// a dual-path measurement run. Aggregating it reproduces the two
// simulate_* results exactly, including every intermediate draw.
std::vector<PulseRecord> generate_pulse_log(const DiscriminationProblem& problem,
                                            const DetectorModel& detector,
                                            const DisplacementSetup& setup,
                                            const HomodyneModel& model,
                                            const SimOptions& options);

struct LogSummary {
  ErrorEstimate apd;
  ErrorEstimate homodyne;
};

LogSummary aggregate_pulse_log(std::span<const PulseRecord> log);

// Header "trial,hypothesis,apd_counts,quadrature,decision_apd,
// decision_homodyne"; quadratures keep full round-trip precision and the
// formatting is locale-independent.
void write_pulse_log_csv(std::ostream& out, std::span<const PulseRecord> log);

}  // namespace csd
