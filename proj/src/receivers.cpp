#include "csd/receivers.hpp"

#include <cmath>
#include <string>

#include "csd/errors.hpp"

namespace csd {

namespace {

constexpr double kPriorTol = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void require_equal_priors(const DiscriminationProblem& problem) {
  if (std::abs(problem.prior_plus - 0.5) > kPriorTol) {
    throw InvalidPriorError(
        "closed-form receiver errors are stated for equal priors; got "
        "prior_plus = " +
        std::to_string(problem.prior_plus));
  }
}

ErrorProbability checked(double p) {
  // The algebra bounds every receiver error to [0, 1/2]. At beta = 0 (or
  // alpha = 0) the exact value is 1/2 but the last rounding can land one
  // ulp either side, so snap a tiny window onto the boundary; anything
  // further out means a bug, so fail loudly instead of clamping.
  constexpr double kBoundarySlack = 1e-15;
  if (std::abs(p - 0.5) <= kBoundarySlack) return ErrorProbability{0.5};
  if (!(p >= 0.0 && p <= 0.5)) {
    throw InternalConsistencyError("receiver error probability " +
                                   std::to_string(p) + " outside [0, 1/2]");
  }
  return ErrorProbability{p};
}

}  // namespace

DiscriminationProblem DiscriminationProblem::from_mean_photon_number(
    double alpha2) {
  require(std::isfinite(alpha2) && alpha2 >= 0.0,
          "mean photon number must be finite and >= 0");
  return DiscriminationProblem{std::sqrt(alpha2), 0.5, 0.5};
}

double DisplacementSetup::gamma() const {
  require(transmittance < 1.0,
          "auxiliary amplitude gamma is undefined at transmittance = 1");
  return beta / std::sqrt(1.0 - transmittance);
}

DisplacementSetup DisplacementSetup::from_gamma(double transmittance,
                                                double gamma) {
  require(std::isfinite(gamma) && gamma >= 0.0,
          "gamma must be finite and >= 0");
  require(std::isfinite(transmittance) && transmittance > 0.0 &&
              transmittance < 1.0,
          "from_gamma needs transmittance in (0, 1)");
  return DisplacementSetup{transmittance,
                           std::sqrt(1.0 - transmittance) * gamma};
}

void validate(const DiscriminationProblem& problem) {
  require(std::isfinite(problem.alpha) && problem.alpha >= 0.0,
          "alpha must be finite and >= 0");
  require(std::isfinite(problem.prior_plus) && problem.prior_plus >= 0.0 &&
              problem.prior_plus <= 1.0,
          "prior_plus must lie in [0, 1]");
  require(std::isfinite(problem.prior_minus) && problem.prior_minus >= 0.0 &&
              problem.prior_minus <= 1.0,
          "prior_minus must lie in [0, 1]");
  require(std::abs(problem.prior_plus + problem.prior_minus - 1.0) <= kPriorTol,
          "priors must sum to 1");
}

void validate(const DetectorModel& detector) {
  require(std::isfinite(detector.eta) && detector.eta >= 0.0 &&
              detector.eta <= 1.0,
          "quantum efficiency eta must lie in [0, 1]");
  require(std::isfinite(detector.nu) && detector.nu >= 0.0,
          "dark count mean nu must be finite and >= 0");
  require(std::isfinite(detector.xi) && detector.xi >= 0.0 &&
              detector.xi <= 1.0,
          "visibility xi must lie in [0, 1]");
}

void validate(const DisplacementSetup& setup) {
  require(std::isfinite(setup.transmittance) && setup.transmittance > 0.0 &&
              setup.transmittance <= 1.0,
          "transmittance must lie in (0, 1]");
  require(std::isfinite(setup.beta) && setup.beta >= 0.0,
          "displacement beta must be finite and >= 0");
}

ErrorProbability helstrom_error(const DiscriminationProblem& problem) {
  validate(problem);
  require_equal_priors(problem);
  const double a2 = problem.alpha * problem.alpha;
  // expm1 keeps 1 - |<alpha|-alpha>|^2 = 1 - exp(-4 a^2) accurate when the
  // overlap is close to one (small a^2).
  return checked(0.5 * (1.0 - std::sqrt(-std::expm1(-4.0 * a2))));
}

ErrorProbability kennedy_error(const DiscriminationProblem& problem) {
  validate(problem);
  require_equal_priors(problem);
  const double a2 = problem.alpha * problem.alpha;
  return checked(0.5 * std::exp(-4.0 * a2));
}

ErrorProbability homodyne_error(const DiscriminationProblem& problem) {
  validate(problem);
  require_equal_priors(problem);
  // P(x < 0 | +alpha) with x ~ N(alpha, 1/4): erfc(sqrt(2) * alpha) / 2.
  return checked(0.5 * std::erfc(std::sqrt(2.0) * problem.alpha));
}

std::pair<double, double> detected_means(const DiscriminationProblem& problem,
                                         const DetectorModel& detector,
                                         const DisplacementSetup& setup) {
  validate(problem);
  validate(detector);
  validate(setup);
  const double sa = std::sqrt(setup.transmittance) * problem.alpha;
  const double b = setup.beta;
  // Grouped as a square plus a non-negative visibility term so the minus
  // branch cannot dip below zero through cancellation; at full visibility
  // and beta = sqrt(T) * alpha it is exactly zero (the dark port).
  const double mix = 2.0 * (1.0 - detector.xi) * sa * b;
  const double n_plus = (sa + b) * (sa + b) - mix;
  const double n_minus = (sa - b) * (sa - b) + mix;
  if (!(n_plus >= 0.0) || !(n_minus >= 0.0)) {
    throw InternalConsistencyError(
        "negative mean photon number after displacement");
  }
  return {detector.nu + detector.eta * n_plus,
          detector.nu + detector.eta * n_minus};
}

ClickProbabilities click_probabilities(const DiscriminationProblem& problem,
                                       const DetectorModel& detector,
                                       const DisplacementSetup& setup) {
  const auto [mu_plus, mu_minus] = detected_means(problem, detector, setup);
  // P(at least one count) for Poissonian counts of mean mu.
  return ClickProbabilities{-std::expm1(-mu_plus), -std::expm1(-mu_minus)};
}

ErrorProbability displacement_error(const DiscriminationProblem& problem,
                                    const DetectorModel& detector,
                                    const DisplacementSetup& setup) {
  require_equal_priors(problem);
  // Equivalent to 1/2 - exp(-(nu + eta (T a^2 + b^2))) sinh(2 eta xi
  // sqrt(T) a b), rewritten through the per-hypothesis click means. Both
  // exponents are then non-positive, so nothing overflows even for very
  // large amplitudes where exp * sinh would hit inf * 0.
  const auto [mu_plus, mu_minus] = detected_means(problem, detector, setup);
  return checked(0.5 * (std::exp(-mu_plus) - std::expm1(-mu_minus)));
}

}  // namespace csd
