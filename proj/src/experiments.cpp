#include "csd/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "csd/errors.hpp"

namespace csd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent sub-seed for every (sweep point, receiver) pair so series
// are uncorrelated but still fully determined by the top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t point,
                          std::uint32_t tag) {
  return splitmix64(seed ^ splitmix64((point << 8) + tag + 1));
}

std::uint32_t receiver_tag(Receiver r) {
  switch (r) {
    case Receiver::helstrom: return 0;
    case Receiver::kennedy: return 1;
    case Receiver::homodyne: return 2;
    case Receiver::displacement_opt: return 3;
  }
  throw DomainError("unknown receiver");
}

void check_grid(const std::vector<double>& grid, const char* what,
                double min_allowed = 0.0) {
  if (grid.empty()) {
    throw DomainError(std::string(what) + " grid must not be empty");
  }
  for (double v : grid) {
    if (!(std::isfinite(v) && v >= min_allowed)) {
      throw DomainError(std::string(what) + " grid value " +
                        std::to_string(v) + " out of range");
    }
  }
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double receiver_efficiency(Receiver r, const DetectorModel& detector,
                           const HomodyneModel& homodyne) {
  switch (r) {
    case Receiver::helstrom:
      return 1.0;  // a bound, not a detection chain
    case Receiver::kennedy:
    case Receiver::displacement_opt:
      return detector.eta;
    case Receiver::homodyne:
      return homodyne.efficiency;
  }
  throw DomainError("unknown receiver");
}

}  // namespace

std::string to_string(Mode mode) {
  return mode == Mode::ideal ? "ideal" : "corrected";
}

std::string to_string(Receiver receiver) {
  switch (receiver) {
    case Receiver::helstrom: return "helstrom";
    case Receiver::kennedy: return "kennedy";
    case Receiver::homodyne: return "homodyne";
    case Receiver::displacement_opt: return "opt_displacement";
  }
  throw DomainError("unknown receiver");
}

Mode mode_from_string(const std::string& name) {
  if (name == "ideal") return Mode::ideal;
  if (name == "corrected") return Mode::corrected;
  throw DomainError("unknown mode \"" + name + "\"");
}

Receiver receiver_from_string(const std::string& name) {
  if (name == "helstrom") return Receiver::helstrom;
  if (name == "kennedy") return Receiver::kennedy;
  if (name == "homodyne") return Receiver::homodyne;
  if (name == "opt_displacement") return Receiver::displacement_opt;
  throw DomainError("unknown receiver \"" + name + "\"");
}

const SweepSeries* SweepResult::find(const std::string& name) const {
  for (const SweepSeries& s : series) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

SweepResult amplitude_sweep(const AmplitudeSweepOptions& options) {
  check_grid(options.alpha2_grid, "alpha2");
  validate(options.detector);
  validate(options.homodyne);

  SweepResult out;
  out.axis_name = "alpha2";
  out.axis_values = options.alpha2_grid;
  const std::size_t n = options.alpha2_grid.size();

  for (Receiver r : options.receivers) {
    const double eff =
        receiver_efficiency(r, options.detector, options.homodyne);
    if (options.mode == Mode::corrected && eff <= 0.0) {
      throw DomainError("corrected mode needs a nonzero efficiency for " +
                        to_string(r));
    }
    std::vector<double> analytic;
    std::vector<double> mc;
    std::vector<double> mc_err;
    analytic.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double axis = options.alpha2_grid[i];
      const double phys =
          options.mode == Mode::corrected ? axis / eff : axis;
      const auto problem =
          DiscriminationProblem::from_mean_photon_number(phys);
      double value = 0.0;
      double beta_star = 0.0;
      switch (r) {
        case Receiver::helstrom:
          value = helstrom_error(problem).value;
          break;
        case Receiver::kennedy:
          beta_star = problem.alpha;
          value = displacement_error(problem, options.detector,
                                     DisplacementSetup{1.0, beta_star})
                      .value;
          break;
        case Receiver::homodyne:
          value = homodyne_error_model(problem, options.homodyne).value;
          break;
        case Receiver::displacement_opt:
          if (problem.alpha == 0.0) {
            value = 0.5;  // degenerate point: every displacement ties
          } else {
            beta_star =
                optimal_beta(problem, options.detector, 1.0).root;
            value = displacement_error(problem, options.detector,
                                       DisplacementSetup{1.0, beta_star})
                        .value;
          }
          break;
      }
      if (options.engine.analytic) analytic.push_back(value);
      if (options.engine.monte_carlo && r != Receiver::helstrom) {
        SimOptions sim;
        sim.trials = options.engine.trials;
        sim.seed = derive_seed(options.engine.seed, i, receiver_tag(r));
        sim.workers = options.engine.workers;
        ErrorEstimate est;
        if (r == Receiver::homodyne) {
          est = simulate_homodyne_sequence(problem, options.homodyne, sim);
        } else {
          est = simulate_apd_sequence(problem, options.detector,
                                      DisplacementSetup{1.0, beta_star}, sim);
        }
        mc.push_back(est.p_hat);
        mc_err.push_back(est.std_err);
      }
    }
    if (!analytic.empty()) {
      out.series.push_back(SweepSeries{to_string(r), std::move(analytic)});
    }
    if (!mc.empty()) {
      out.series.push_back(SweepSeries{to_string(r) + "_mc", std::move(mc)});
      out.series.push_back(
          SweepSeries{to_string(r) + "_mc_stderr", std::move(mc_err)});
    }
  }
  return out;
}

SweepResult beta_sweep(const BetaSweepOptions& options) {
  if (!(std::isfinite(options.alpha2) && options.alpha2 > 0.0)) {
    throw DomainError("beta sweep needs alpha2 > 0");
  }
  validate(options.detector);
  const std::vector<double> grid = options.beta2_grid.empty()
                                       ? default_beta2_grid(options.alpha2)
                                       : options.beta2_grid;
  check_grid(grid, "beta2");
  if (options.gamma2) {
    if (!(std::isfinite(*options.gamma2) && *options.gamma2 > 0.0)) {
      throw DomainError("fixed-gamma beta sweep needs gamma2 > 0");
    }
    for (double b2 : grid) {
      if (b2 >= *options.gamma2) {
        throw DomainError(
            "beta2 grid must stay below gamma2 when gamma is held fixed");
      }
    }
  } else if (!(std::isfinite(options.transmittance) &&
               options.transmittance > 0.0 && options.transmittance <= 1.0)) {
    throw DomainError("transmittance must lie in (0, 1]");
  }

  const auto problem =
      DiscriminationProblem::from_mean_photon_number(options.alpha2);
  auto setup_for = [&](double b2) {
    const double t =
        options.gamma2 ? 1.0 - b2 / *options.gamma2 : options.transmittance;
    return DisplacementSetup{t, std::sqrt(b2)};
  };

  SweepResult out;
  out.axis_name = "beta2";
  out.axis_values = grid;

  std::vector<double> analytic;
  std::vector<double> mc;
  std::vector<double> mc_err;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const DisplacementSetup setup = setup_for(grid[i]);
    if (options.engine.analytic) {
      analytic.push_back(
          displacement_error(problem, options.detector, setup).value);
    }
    if (options.engine.monte_carlo) {
      SimOptions sim;
      sim.trials = options.engine.trials;
      sim.seed = derive_seed(options.engine.seed, i, 1);
      sim.workers = options.engine.workers;
      const ErrorEstimate est =
          simulate_apd_sequence(problem, options.detector, setup, sim);
      mc.push_back(est.p_hat);
      mc_err.push_back(est.std_err);
    }
  }
  if (!analytic.empty()) {
    out.series.push_back(SweepSeries{"error", analytic});
  }
  if (!mc.empty()) {
    out.series.push_back(SweepSeries{"error_mc", std::move(mc)});
    out.series.push_back(SweepSeries{"error_mc_stderr", std::move(mc_err)});
  }

  // Matched-displacement reference point (the photon-counting receiver
  // without displacement optimization).
  if (!options.gamma2 || options.alpha2 < *options.gamma2) {
    out.annotations["kennedy_beta2"] = options.alpha2;
    out.annotations["kennedy_error"] =
        displacement_error(problem, options.detector, setup_for(options.alpha2))
            .value;
  }

  // Solver optimum under the same displacement policy as the sweep.
  double optimal_beta2 = 0.0;
  if (options.gamma2) {
    const RootResult rt = optimal_transmittance(problem, options.detector,
                                                std::sqrt(*options.gamma2));
    const DisplacementSetup best =
        DisplacementSetup::from_gamma(rt.root, std::sqrt(*options.gamma2));
    optimal_beta2 = best.beta * best.beta;
    out.annotations["optimal_t"] = rt.root;
    out.annotations["optimal_beta2"] = optimal_beta2;
    out.annotations["optimal_error"] =
        displacement_error(problem, options.detector, best).value;
    out.annotations["solver_residual"] = rt.residual;
  } else {
    const RootResult rb =
        optimal_beta(problem, options.detector, options.transmittance);
    optimal_beta2 = rb.root * rb.root;
    out.annotations["optimal_beta2"] = optimal_beta2;
    out.annotations["optimal_error"] =
        displacement_error(problem, options.detector,
                           DisplacementSetup{options.transmittance, rb.root})
            .value;
    out.annotations["solver_residual"] = rb.residual;
  }

  if (!analytic.empty()) {
    const std::size_t argmin = static_cast<std::size_t>(
        std::min_element(analytic.begin(), analytic.end()) -
        analytic.begin());
    out.annotations["grid_argmin_beta2"] = grid[argmin];
    double step = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      step = std::max(step, std::abs(grid[i] - grid[i - 1]));
    }
    if (std::abs(grid[argmin] - optimal_beta2) > step + 1e-12) {
      out.warnings.push_back(
          "grid minimum at beta2 = " + std::to_string(grid[argmin]) +
          " is more than one grid step from the solver optimum " +
          std::to_string(optimal_beta2));
    }
  }
  return out;
}

SweepResult gamma_sweep(const GammaSweepOptions& options) {
  if (!(std::isfinite(options.alpha2) && options.alpha2 > 0.0)) {
    throw DomainError("gamma sweep needs alpha2 > 0");
  }
  validate(options.detector);
  check_grid(options.gamma2_grid, "gamma2");

  const auto problem =
      DiscriminationProblem::from_mean_photon_number(options.alpha2);
  SweepResult out;
  out.axis_name = "gamma2";
  std::vector<double> error;
  std::vector<double> t_opt;
  std::vector<double> beta2_opt;
  for (double g2 : options.gamma2_grid) {
    RootResult rt;
    try {
      rt = optimal_transmittance(problem, options.detector, std::sqrt(g2));
    } catch (const SingularInputError&) {
      out.warnings.push_back("skipped gamma2 = " + std::to_string(g2) +
                             ": optimality condition is singular where "
                             "gamma2 matches alpha2");
      continue;
    }
    const DisplacementSetup best =
        DisplacementSetup::from_gamma(rt.root, std::sqrt(g2));
    out.axis_values.push_back(g2);
    error.push_back(
        displacement_error(problem, options.detector, best).value);
    t_opt.push_back(rt.root);
    beta2_opt.push_back(best.beta * best.beta);
  }
  out.series.push_back(SweepSeries{"error", std::move(error)});
  out.series.push_back(SweepSeries{"t_opt", std::move(t_opt)});
  out.series.push_back(SweepSeries{"beta2_opt", std::move(beta2_opt)});

  // Loss-free reference: the optimum with the displacement applied at
  // unit transmittance, which the curve approaches as gamma2 grows.
  const RootResult rb = optimal_beta(problem, options.detector, 1.0);
  out.annotations["unit_t_optimal_error"] =
      displacement_error(problem, options.detector,
                         DisplacementSetup{1.0, rb.root})
          .value;
  return out;
}

double receiver_error(Receiver receiver, double alpha2,
                      const DetectorModel& detector,
                      const HomodyneModel& homodyne) {
  const auto problem = DiscriminationProblem::from_mean_photon_number(alpha2);
  switch (receiver) {
    case Receiver::helstrom:
      return helstrom_error(problem).value;
    case Receiver::kennedy:
      return displacement_error(problem, detector,
                                DisplacementSetup{1.0, problem.alpha})
          .value;
    case Receiver::homodyne:
      return homodyne_error_model(problem, homodyne).value;
    case Receiver::displacement_opt: {
      if (problem.alpha == 0.0) return 0.5;
      const double b = optimal_beta(problem, detector, 1.0).root;
      return displacement_error(problem, detector,
                                DisplacementSetup{1.0, b})
          .value;
    }
  }
  throw DomainError("unknown receiver");
}

double crossover_find(const CrossoverOptions& options) {
  validate(options.detector);
  validate(options.homodyne);
  if (!(std::isfinite(options.bracket_lo) && std::isfinite(options.bracket_hi) &&
        options.bracket_lo >= 0.0 &&
        options.bracket_lo < options.bracket_hi)) {
    throw InvalidBracketError("crossover bracket needs 0 <= lo < hi");
  }
  if (!(options.tol > 0.0)) {
    throw DomainError("crossover tolerance must be > 0");
  }

  auto diff = [&](double a2) {
    return receiver_error(options.first, a2, options.detector,
                          options.homodyne) -
           receiver_error(options.second, a2, options.detector,
                          options.homodyne);
  };

  double lo = options.bracket_lo;
  double hi = options.bracket_hi;
  double d_lo = diff(lo);
  const double d_hi = diff(hi);
  if (!(d_lo * d_hi < 0.0)) {
    throw NoSignChangeError("error curves of " + to_string(options.first) +
                            " and " + to_string(options.second) +
                            " do not cross inside the bracket");
  }
  int iter = 0;
  while (hi - lo > options.tol && iter < 200) {
    const double mid = 0.5 * (lo + hi);
    const double d_mid = diff(mid);
    if (d_mid == 0.0) return mid;
    if ((d_mid < 0.0) == (d_lo < 0.0)) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
    }
    ++iter;
  }
  return 0.5 * (lo + hi);
}

double mutual_information(double p_error) {
  if (!(p_error >= 0.0 && p_error <= 1.0)) {
    throw DomainError("mutual_information needs p in [0, 1]");
  }
  auto xlog2x = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  return 1.0 + xlog2x(p_error) + xlog2x(1.0 - p_error);
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points == 0) throw DomainError("linspace needs at least one point");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw DomainError("linspace needs finite lo <= hi");
  }
  std::vector<double> out;
  out.reserve(points);
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t i = 0; i < points; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(points - 1));
  }
  out.back() = hi;
  return out;
}

std::vector<double> default_beta2_grid(double alpha2) {
  return linspace(0.0, 4.0 * std::max(0.25, alpha2), 50);
}

std::string sweep_to_csv(const SweepResult& result) {
  for (const SweepSeries& s : result.series) {
    if (s.values.size() != result.axis_values.size()) {
      throw InternalConsistencyError("series \"" + s.name +
                                     "\" does not match the axis length");
    }
  }
  std::string out = result.axis_name;
  for (const SweepSeries& s : result.series) {
    out += ',';
    out += s.name;
  }
  out += '\n';
  for (std::size_t i = 0; i < result.axis_values.size(); ++i) {
    append_double(out, result.axis_values[i]);
    for (const SweepSeries& s : result.series) {
      out += ',';
      append_double(out, s.values[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace csd
