#pragma once

#include <utility>

namespace csd {

// Binary alphabet {|+alpha>, |-alpha>} with real amplitude alpha >= 0.
// alpha^2 is the mean photon number of either signal state.
struct DiscriminationProblem {
  double alpha = 0.0;
  double prior_plus = 0.5;
  double prior_minus = 0.5;

  double mean_photon_number() const { return alpha * alpha; }
  static DiscriminationProblem from_mean_photon_number(double alpha2);
};

// Photon-counter imperfections: quantum efficiency eta, mean dark counts
// per gate nu, and interference visibility xi of the displacement stage.
// (1, 0, 1) is the ideal counter.
struct DetectorModel {
  double eta = 1.0;
  double nu = 0.0;
  double xi = 1.0;

  static DetectorModel ideal() { return {}; }
};

// Displacement stage: power transmittance T of the combining beam splitter
// and the effective displacement amplitude beta >= 0. The auxiliary
// oscillator amplitude gamma = beta / sqrt(1 - T) exists only for T < 1.
struct DisplacementSetup {
  double transmittance = 1.0;
  double beta = 0.0;

  double gamma() const;
  static DisplacementSetup from_gamma(double transmittance, double gamma);
};

// Average probability of deciding wrong, in [0, 1/2] for any sensible
// receiver at equal priors.
struct ErrorProbability {
  double value = 0.0;
};

struct ClickProbabilities {
  double given_plus;   // P(click | +alpha)
  double given_minus;  // P(click | -alpha)
};

void validate(const DiscriminationProblem& problem);
void validate(const DetectorModel& detector);
void validate(const DisplacementSetup& setup);

// Quantum-mechanical minimum error for the binary alphabet.
ErrorProbability helstrom_error(const DiscriminationProblem& problem);

// Ideal photon-counting receiver displaced by exactly alpha (beta = alpha,
// T = 1): errs only when |-alpha> maps to vacuum and stays dark.
ErrorProbability kennedy_error(const DiscriminationProblem& problem);

// Ideal homodyne receiver deciding on the sign of the measured quadrature.
ErrorProbability homodyne_error(const DiscriminationProblem& problem);

// General displaced photon counting with detector imperfections. Reduces to
// kennedy_error for the ideal detector at T = 1, beta = alpha.
ErrorProbability displacement_error(const DiscriminationProblem& problem,
                                    const DetectorModel& detector,
                                    const DisplacementSetup& setup);

// Click probability under either hypothesis; the average error recombines
// from these as prior_plus * (1 - p_click|+) + prior_minus * p_click|-.
ClickProbabilities click_probabilities(const DiscriminationProblem& problem,
                                       const DetectorModel& detector,
                                       const DisplacementSetup& setup);

// Mean detected photon numbers nu + eta * n(+/-) that drive the click
// statistics; n(-/+) are the output mean photon numbers after displacement.
std::pair<double, double> detected_means(const DiscriminationProblem& problem,
                                         const DetectorModel& detector,
                                         const DisplacementSetup& setup);

}  // namespace csd
