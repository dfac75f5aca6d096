#include "csd/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "csd/errors.hpp"

namespace csd {

namespace {

constexpr double kRootResidualTol = 1e-10;
constexpr double kStationarityResidualTol = 1e-8;
constexpr int kIterationCap = 200;

// Stay strictly inside (0, 1) when sweeping the transmittance; both
// endpoints are suprema of the objective, not minima.
constexpr double kTransmittanceEdge = 1e-9;

void check_solvable(const DiscriminationProblem& problem,
                    const DetectorModel& detector) {
  validate(problem);
  validate(detector);
  if (problem.alpha == 0.0) {
    throw DegenerateInputError(
        "optimality condition is degenerate at alpha = 0: every displacement "
        "gives error 1/2");
  }
  if (detector.eta == 0.0 || detector.xi == 0.0) {
    throw DegenerateInputError(
        "error probability is flat when eta or xi vanishes; no unique "
        "optimum exists");
  }
}

}  // namespace

RootResult minimize_scalar(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw InvalidBracketError("minimize_scalar needs finite lo < hi");
  }
  if (!(std::isfinite(tol) && tol > 0.0)) {
    throw DomainError("minimize_scalar needs tol > 0");
  }
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int iter = 0;
  while (b - a > tol && iter < kIterationCap) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++iter;
  }
  if (b - a > tol) {
    throw ConvergenceError("minimize_scalar: bracket still " +
                           std::to_string(b - a) + " wide after " +
                           std::to_string(iter) + " iterations");
  }
  return RootResult{0.5 * (a + b), b - a, iter};
}

RootResult optimal_beta(const DiscriminationProblem& problem,
                        const DetectorModel& detector, double transmittance) {
  check_solvable(problem, detector);
  if (!(std::isfinite(transmittance) && transmittance > 0.0 &&
        transmittance <= 1.0)) {
    throw DomainError("transmittance must lie in (0, 1]");
  }
  const double rt = std::sqrt(transmittance);
  const double target = detector.xi * rt * problem.alpha;
  const double slope = 2.0 * detector.eta * target;
  // f(0) = -target < 0 and f grows without bound, with f' > 0 throughout,
  // so the positive root is unique and plain bisection cannot miss it.
  auto f = [&](double b) { return b * std::tanh(slope * b) - target; };

  int iter = 0;
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * target);
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++iter >= kIterationCap) {
      throw ConvergenceError("optimal_beta: failed to bracket the root");
    }
  }
  while (iter < kIterationCap) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    ++iter;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  const double residual = std::abs(f(root));
  if (residual > kRootResidualTol) {
    throw ConvergenceError("optimal_beta: residual " +
                           std::to_string(residual) + " above tolerance");
  }

  // The root of the stationarity condition must actually be the minimum.
  const DisplacementSetup at{transmittance, root};
  const double p0 = displacement_error(problem, detector, at).value;
  const double delta = 1e-4;
  const double p_lo =
      displacement_error(problem, detector,
                         DisplacementSetup{transmittance, root - delta})
          .value;
  const double p_hi =
      displacement_error(problem, detector,
                         DisplacementSetup{transmittance, root + delta})
          .value;
  if (p0 > p_lo || p0 > p_hi) {
    throw InternalConsistencyError(
        "optimal_beta: stationary point is not a local minimum");
  }
  return RootResult{root, residual, iter};
}

RootResult optimal_transmittance(const DiscriminationProblem& problem,
                                 const DetectorModel& detector, double gamma) {
  check_solvable(problem, detector);
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw DomainError("gamma must be finite and > 0");
  }
  const double a = problem.alpha;
  if (std::abs(a - gamma) <= 1e-12 * std::max(a, gamma)) {
    throw SingularInputError(
        "stationarity condition in T is singular at alpha = gamma");
  }

  const double eta = detector.eta;
  const double xi = detector.xi;
  // d(error)/dT shares its sign with g(T) = A' tanh(S) - S', where
  // A = nu + eta (T a^2 + (1-T) g^2) and S = 2 eta xi sqrt(T(1-T)) a g.
  // g is negative left of the optimum and positive right of it, with a
  // single crossing in (0, 1), so a sign bisection always converges; the
  // tanh form stays bounded where sinh/cosh would overflow.
  const double a_prime = eta * (a * a - gamma * gamma);
  auto deriv_sign = [&](double t) {
    const double s = std::sqrt(t * (1.0 - t));
    const double big_s = 2.0 * eta * xi * s * a * gamma;
    const double s_prime = eta * xi * a * gamma * (1.0 - 2.0 * t) / s;
    return a_prime * std::tanh(big_s) - s_prime;
  };
  auto error_at = [&](double t) {
    return displacement_error(problem, detector,
                              DisplacementSetup::from_gamma(t, gamma))
        .value;
  };

  int iter = 0;
  double lo = kTransmittanceEdge;
  double hi = 1.0 - kTransmittanceEdge;

  // Narrow the bracket around the fixed-transmittance solution when it
  // gives one (beta held by the constraint reaches beta* only if beta* <
  // gamma); fall back to the full interval otherwise.
  double t_guess = 0.5;
  const RootResult at_unit = optimal_beta(problem, detector, 1.0);
  iter += at_unit.iterations;
  if (at_unit.root < gamma) {
    const double ratio = at_unit.root / gamma;
    t_guess = 1.0 - ratio * ratio;
  }
  for (double width : {0.05, 0.2}) {
    const double l = std::max(lo, t_guess - width);
    const double h = std::min(hi, t_guess + width);
    if (l < h && deriv_sign(l) < 0.0 && deriv_sign(h) > 0.0) {
      lo = l;
      hi = h;
      break;
    }
    iter += 2;
  }

  // Golden-section localization on the error itself, then polish the
  // stationary point by bisecting the derivative sign inside the bracket.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  {
    double ga = lo, gb = hi;
    double c = gb - invphi * (gb - ga);
    double d = ga + invphi * (gb - ga);
    double fc = error_at(c);
    double fd = error_at(d);
    while (gb - ga > 1e-4 && iter < kIterationCap) {
      if (fc < fd) {
        gb = d;
        d = c;
        fd = fc;
        c = gb - invphi * (gb - ga);
        fc = error_at(c);
      } else {
        ga = c;
        c = d;
        fc = fd;
        d = ga + invphi * (gb - ga);
        fd = error_at(d);
      }
      ++iter;
    }
    if (deriv_sign(ga) < 0.0 && deriv_sign(gb) > 0.0) {
      lo = ga;
      hi = gb;
    }
    // else: ties on a flat plateau may have discarded the dip; keep the
    // wider verified bracket.
  }
  while (iter < kIterationCap) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iter;
    if (deriv_sign(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);

  // Residual of the stationarity condition in its quotient form.
  const double s = std::sqrt(root * (1.0 - root));
  const double residual =
      std::abs(xi * a * gamma * (1.0 - 2.0 * root) /
                   ((a * a - gamma * gamma) * s) -
               std::tanh(2.0 * eta * xi * s * a * gamma));
  if (residual > kStationarityResidualTol) {
    throw ConvergenceError("optimal_transmittance: residual " +
                           std::to_string(residual) + " above tolerance");
  }

  const double p0 = error_at(root);
  const double delta = 1e-4 * std::min(root, 1.0 - root);
  if (p0 > error_at(root - delta) || p0 > error_at(root + delta)) {
    throw InternalConsistencyError(
        "optimal_transmittance: stationary point is not a local minimum");
  }
  return RootResult{root, residual, iter};
}

}  // namespace csd
