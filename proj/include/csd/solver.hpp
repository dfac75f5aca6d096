#pragma once

#include <functional>

#include "csd/receivers.hpp"

namespace csd {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;  // |f(root)| for roots, bracket width for minima
  int iterations = 0;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi];
// stops when the bracket width drops below tol.
RootResult minimize_scalar(const std::function<double(double)>& f, double lo,
                           double hi, double tol = 1e-8);

// Displacement beta* > 0 minimizing the photon-counting error at fixed
// transmittance. Solves the stationarity condition
//   xi sqrt(T) alpha = beta * tanh(2 eta xi sqrt(T) alpha beta),
// which has exactly one positive root. The residual reported is the value
// of that condition at the returned beta.
RootResult optimal_beta(const DiscriminationProblem& problem,
                        const DetectorModel& detector, double transmittance);

// Transmittance T* in (0, 1) minimizing the error when the auxiliary
// oscillator amplitude gamma is held fixed (beta = sqrt(1 - T) gamma).
// The residual reported is the stationarity mismatch
//   xi alpha gamma (1 - 2T) / ((alpha^2 - gamma^2) sqrt(T(1-T)))
//     - tanh(2 eta xi sqrt(T(1-T)) alpha gamma)
// at the returned T.
RootResult optimal_transmittance(const DiscriminationProblem& problem,
                                 const DetectorModel& detector, double gamma);

}  // namespace csd
