#include "csd/pulse_sim.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "csd/errors.hpp"

namespace csd {

namespace {

// One independent engine per (seed, chunk, purpose). Seeding off the chunk
// index rather than a running engine state is what makes the draw
// independent of how chunks are distributed over workers.
enum StreamTag : std::uint32_t {
  kHypothesisStream = 0,
  kApdStream = 1,
  kQuadratureStream = 2,
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t chunk,
                            std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32), tag};
  return std::mt19937_64(seq);
}

struct ApdParams {
  double mu_plus;
  double mu_minus;
};

struct QuadParams {
  double mean;
  double sigma;
};

struct ChunkCounts {
  std::uint64_t wrong_apd = 0;
  std::uint64_t wrong_homodyne = 0;
};

// Runs one chunk of trials. Either detector block may be disabled; records
// is an optional destination slice of exactly `count` entries.
ChunkCounts run_chunk(double prior_plus, const ApdParams* apd,
                      const QuadParams* quad, std::uint64_t seed,
                      std::uint64_t chunk_index, std::uint32_t count,
                      PulseRecord* records) {
  ChunkCounts counts;
  auto hyp_eng = make_stream(seed, chunk_index, kHypothesisStream);
  std::bernoulli_distribution is_plus(prior_plus);

  std::mt19937_64 apd_eng;
  std::poisson_distribution<std::uint32_t> counts_plus;
  std::poisson_distribution<std::uint32_t> counts_minus;
  if (apd != nullptr) {
    apd_eng = make_stream(seed, chunk_index, kApdStream);
    // poisson_distribution requires a strictly positive mean; a vanishing
    // mean (dark port of an ideal detector) deterministically yields zero
    // counts and draws nothing, identically in every caller.
    if (apd->mu_plus > 0.0) {
      counts_plus = std::poisson_distribution<std::uint32_t>(apd->mu_plus);
    }
    if (apd->mu_minus > 0.0) {
      counts_minus = std::poisson_distribution<std::uint32_t>(apd->mu_minus);
    }
  }

  std::mt19937_64 quad_eng;
  std::normal_distribution<double> noise;
  if (quad != nullptr) {
    quad_eng = make_stream(seed, chunk_index, kQuadratureStream);
    noise = std::normal_distribution<double>(0.0, quad->sigma);
  }

  for (std::uint32_t i = 0; i < count; ++i) {
    const int hyp = is_plus(hyp_eng) ? 1 : -1;
    std::uint32_t n = 0;
    double x = 0.0;
    int decision_apd = 0;
    int decision_homodyne = 0;
    if (apd != nullptr) {
      const double mu = hyp > 0 ? apd->mu_plus : apd->mu_minus;
      if (mu > 0.0) {
        n = hyp > 0 ? counts_plus(apd_eng) : counts_minus(apd_eng);
      }
      decision_apd = n > 0 ? 1 : -1;
      counts.wrong_apd += decision_apd != hyp;
    }
    if (quad != nullptr) {
      x = hyp * quad->mean + noise(quad_eng);
      decision_homodyne = x > 0.0 ? 1 : -1;
      counts.wrong_homodyne += decision_homodyne != hyp;
    }
    if (records != nullptr) {
      records[i] = PulseRecord{static_cast<std::int8_t>(hyp), n, x,
                               static_cast<std::int8_t>(decision_apd),
                               static_cast<std::int8_t>(decision_homodyne)};
    }
  }
  return counts;
}

ChunkCounts run_all_chunks(double prior_plus, const ApdParams* apd,
                           const QuadParams* quad, const SimOptions& options,
                           PulseRecord* records) {
  const std::uint64_t chunk_size = options.chunk_size;
  const std::uint64_t n_chunks =
      (options.trials + chunk_size - 1) / chunk_size;
  auto chunk_count = [&](std::uint64_t chunk) {
    const std::uint64_t first = chunk * chunk_size;
    return static_cast<std::uint32_t>(
        std::min<std::uint64_t>(chunk_size, options.trials - first));
  };

  unsigned workers = options.workers;
  if (n_chunks < workers) workers = static_cast<unsigned>(n_chunks);

  ChunkCounts total;
  if (workers <= 1) {
    for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk) {
      const ChunkCounts c =
          run_chunk(prior_plus, apd, quad, options.seed, chunk,
                    chunk_count(chunk),
                    records ? records + chunk * chunk_size : nullptr);
      total.wrong_apd += c.wrong_apd;
      total.wrong_homodyne += c.wrong_homodyne;
    }
    return total;
  }

  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> wrong_apd{0};
  std::atomic<std::uint64_t> wrong_homodyne{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t chunk =
            next_chunk.fetch_add(1, std::memory_order_relaxed);
        if (chunk >= n_chunks) return;
        const ChunkCounts c =
            run_chunk(prior_plus, apd, quad, options.seed, chunk,
                      chunk_count(chunk),
                      records ? records + chunk * chunk_size : nullptr);
        wrong_apd.fetch_add(c.wrong_apd, std::memory_order_relaxed);
        wrong_homodyne.fetch_add(c.wrong_homodyne, std::memory_order_relaxed);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  total.wrong_apd = wrong_apd.load();
  total.wrong_homodyne = wrong_homodyne.load();
  return total;
}

}  // namespace

void validate(const HomodyneModel& model) {
  if (!(std::isfinite(model.efficiency) && model.efficiency >= 0.0 &&
        model.efficiency <= 1.0)) {
    throw DomainError("homodyne efficiency must lie in [0, 1]");
  }
  if (!(std::isfinite(model.excess_noise) && model.excess_noise >= 0.0)) {
    throw DomainError("homodyne excess noise must be finite and >= 0");
  }
}

void validate(const SimOptions& options) {
  if (options.chunk_size == 0) {
    throw DomainError("simulation chunk size must be >= 1");
  }
  if (options.workers == 0) {
    throw DomainError("simulation needs at least one worker");
  }
}

ErrorProbability homodyne_error_model(const DiscriminationProblem& problem,
                                      const HomodyneModel& model) {
  validate(problem);
  validate(model);
  if (std::abs(problem.prior_plus - 0.5) > 1e-12) {
    throw InvalidPriorError(
        "homodyne_error_model is stated for equal priors");
  }
  // x ~ N(+-m, sigma^2) with m = sqrt(eff) alpha and sigma^2 = (1+excess)/4:
  // P(x < 0 | +) = erfc(m / (sigma sqrt(2))) / 2.
  const double mean = std::sqrt(model.efficiency) * problem.alpha;
  const double sigma = 0.5 * std::sqrt(1.0 + model.excess_noise);
  const double p = 0.5 * std::erfc(mean / (sigma * std::sqrt(2.0)));
  if (!(p >= 0.0 && p <= 0.5)) {
    throw InternalConsistencyError("homodyne model error outside [0, 1/2]");
  }
  return ErrorProbability{p};
}

ErrorEstimate make_error_estimate(std::uint64_t wrong, std::uint64_t trials) {
  if (trials == 0) {
    throw DomainError("error estimate needs at least one trial");
  }
  if (wrong > trials) {
    throw InternalConsistencyError("more wrong decisions than trials");
  }
  const double p = static_cast<double>(wrong) / static_cast<double>(trials);
  return ErrorEstimate{p, trials,
                       std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

ErrorEstimate simulate_apd_sequence(const DiscriminationProblem& problem,
                                    const DetectorModel& detector,
                                    const DisplacementSetup& setup,
                                    const SimOptions& options) {
  validate(options);
  if (options.trials == 0) {
    throw DomainError("simulate_apd_sequence needs trials >= 1");
  }
  const auto [mu_plus, mu_minus] = detected_means(problem, detector, setup);
  const ApdParams apd{mu_plus, mu_minus};
  const ChunkCounts counts =
      run_all_chunks(problem.prior_plus, &apd, nullptr, options, nullptr);
  return make_error_estimate(counts.wrong_apd, options.trials);
}

ErrorEstimate simulate_homodyne_sequence(const DiscriminationProblem& problem,
                                         const HomodyneModel& model,
                                         const SimOptions& options) {
  validate(problem);
  validate(model);
  validate(options);
  if (options.trials == 0) {
    throw DomainError("simulate_homodyne_sequence needs trials >= 1");
  }
  const QuadParams quad{std::sqrt(model.efficiency) * problem.alpha,
                        0.5 * std::sqrt(1.0 + model.excess_noise)};
  const ChunkCounts counts =
      run_all_chunks(problem.prior_plus, nullptr, &quad, options, nullptr);
  return make_error_estimate(counts.wrong_homodyne, options.trials);
}

std::vector<PulseRecord> generate_pulse_log(
    const DiscriminationProblem& problem, const DetectorModel& detector,
    const DisplacementSetup& setup, const HomodyneModel& model,
    const SimOptions& options) {
  validate(model);
  validate(options);
  const auto [mu_plus, mu_minus] = detected_means(problem, detector, setup);
  const ApdParams apd{mu_plus, mu_minus};
  const QuadParams quad{std::sqrt(model.efficiency) * problem.alpha,
                        0.5 * std::sqrt(1.0 + model.excess_noise)};
  std::vector<PulseRecord> log(options.trials);
  run_all_chunks(problem.prior_plus, &apd, &quad, options, log.data());
  return log;
}

LogSummary aggregate_pulse_log(std::span<const PulseRecord> log) {
  if (log.empty()) {
    throw DomainError("cannot aggregate an empty pulse log");
  }
  std::uint64_t wrong_apd = 0;
  std::uint64_t wrong_homodyne = 0;
  for (const PulseRecord& r : log) {
    wrong_apd += r.decision_apd != r.hypothesis;
    wrong_homodyne += r.decision_homodyne != r.hypothesis;
  }
  return LogSummary{make_error_estimate(wrong_apd, log.size()),
                    make_error_estimate(wrong_homodyne, log.size())};
}

void write_pulse_log_csv(std::ostream& out,
                         std::span<const PulseRecord> log) {
  out << "trial,hypothesis,apd_counts,quadrature,decision_apd,"
         "decision_homodyne\n";
  // All numbers go through to_chars: exact round trip for the quadrature
  // and no locale surprises regardless of the stream state.
  char line[128];
  for (std::size_t i = 0; i < log.size(); ++i) {
    const PulseRecord& r = log[i];
    char* p = line;
    char* const end = line + sizeof(line);
    p = std::to_chars(p, end, i).ptr;
    *p++ = ',';
    p = std::to_chars(p, end, static_cast<int>(r.hypothesis)).ptr;
    *p++ = ',';
    p = std::to_chars(p, end, r.apd_counts).ptr;
    *p++ = ',';
    p = std::to_chars(p, end, r.quadrature).ptr;
    *p++ = ',';
    p = std::to_chars(p, end, static_cast<int>(r.decision_apd)).ptr;
    *p++ = ',';
    p = std::to_chars(p, end, static_cast<int>(r.decision_homodyne)).ptr;
    *p++ = '\n';
    out.write(line, p - line);
  }
  if (!out) {
    throw IoError("failed while writing pulse log");
  }
}

}  // namespace csd
