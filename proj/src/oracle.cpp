#include "popperlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

namespace popperlab {

namespace {

constexpr std::uint64_t kBlockSize = 8192;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Welford accumulator with Chan's merge.
struct Accumulator {
  std::uint64_t draws = 0;
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t violations = 0;

  void push(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Accumulator& o) {
    draws += o.draws;
    violations += o.violations;
    if (o.n == 0) return;
    if (n == 0) {
      n = o.n;
      mean = o.mean;
      m2 = o.m2;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double delta = o.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    n += o.n;
  }
};

// Runs `block(first, last)` over fixed-size blocks of [0, n) on `workers`
// threads and merges the per-block accumulators in block order, so the result
// does not depend on the worker count.
template <class Block>
Accumulator run_blocks(std::uint64_t n, unsigned workers, const Block& block) {
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Accumulator> partial(blocks);
  std::vector<std::exception_ptr> errors(std::max(1u, workers));

  auto work = [&](unsigned worker) {
    try {
      for (std::uint64_t b = worker; b < blocks; b += std::max(1u, workers)) {
        const std::uint64_t first = b * kBlockSize;
        partial[b] = block(first, std::min(n, first + kBlockSize));
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };

  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Accumulator total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

SampleStats finish(const Accumulator& acc) {
  if (acc.n < 100) {
    throw InsufficientAcceptanceError("Monte Carlo: only " + std::to_string(acc.n) +
                                      " accepted samples out of " + std::to_string(acc.draws) +
                                      " (need >= 100)");
  }
  SampleStats s;
  s.n_draws = acc.draws;
  s.n_accepted = acc.n;
  s.mean = acc.mean;
  s.std = std::sqrt(acc.m2 / static_cast<double>(acc.n - 1));
  s.std_error_of_std = s.std / std::sqrt(2.0 * static_cast<double>(acc.n));
  s.acceptance_rate = static_cast<double>(acc.n) / static_cast<double>(acc.draws);
  s.envelope_violations = acc.violations;
  return s;
}

// Lanes per draw: 0-1 -> y1, 2-3 -> k2, 4 -> acceptance uniform.
constexpr std::uint32_t kLaneY1 = 0;
constexpr std::uint32_t kLaneK2 = 2;
constexpr std::uint32_t kLaneAccept = 4;

} // namespace

void OracleConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t lane) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(lane) + 1) * 0xD6E8FEB86659FD93ull);
  // 53 random bits, centred in their cell so the result is never 0 or 1.
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t index, std::uint32_t lane) {
  const double u1 = counter_uniform(seed, index, lane);
  const double u2 = counter_uniform(seed, index, lane + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SampleStats sample_inclusive(const GaussianPairState& state, const SlitConfig& slit,
                             const OracleConfig& cfg) {
  cfg.validate();
  const auto w = derived_widths(state);
  const double a = slit.half_width();
  auto block = [&](std::uint64_t first, std::uint64_t last) {
    Accumulator acc;
    for (std::uint64_t i = first; i < last; ++i) {
      ++acc.draws;
      const double y1 = w.position_std * counter_normal(cfg.seed, i, kLaneY1);
      if (std::abs(y1) > a) continue;
      acc.push(w.momentum_std * counter_normal(cfg.seed, i, kLaneK2));
    }
    return acc;
  };
  return finish(run_blocks(cfg.n_samples, cfg.workers, block));
}

std::vector<double> accepted_inclusive_k2(const GaussianPairState& state, const SlitConfig& slit,
                                          const OracleConfig& cfg) {
  cfg.validate();
  const auto w = derived_widths(state);
  const double a = slit.half_width();
  std::vector<double> out;
  for (std::uint64_t i = 0; i < cfg.n_samples; ++i) {
    const double y1 = w.position_std * counter_normal(cfg.seed, i, kLaneY1);
    if (std::abs(y1) > a) continue;
    out.push_back(w.momentum_std * counter_normal(cfg.seed, i, kLaneK2));
  }
  return out;
}

SampleStats sample_central(const GaussianPairState& state, const SlitConfig& slit,
                           const OracleConfig& cfg, const QuadratureSpec& spec) {
  cfg.validate();
  const double s_k = derived_widths(state).momentum_std;
  const double peak = std::norm(central_amplitude(state, slit, 0.0, spec));
  const double decay = 2.0 / state.width_sum_sq();

  auto block = [&](std::uint64_t first, std::uint64_t last) {
    Accumulator acc;
    for (std::uint64_t i = first; i < last; ++i) {
      ++acc.draws;
      const double k2 = s_k * counter_normal(cfg.seed, i, kLaneK2);
      const double envelope = peak * std::exp(-decay * k2 * k2);
      const double target = std::norm(central_amplitude(state, slit, k2, spec));
      if (target > envelope * (1.0 + 1e-12)) ++acc.violations;
      if (counter_uniform(cfg.seed, i, kLaneAccept) * envelope <= target) acc.push(k2);
    }
    return acc;
  };
  const auto stats = finish(run_blocks(cfg.n_samples, cfg.workers, block));
  if (stats.envelope_violations > 0) {
    throw EnvelopeViolationError("sample_central: target exceeded the envelope at " +
                                 std::to_string(stats.envelope_violations) + " draws");
  }
  return stats;
}

double zscore_report(const SampleStats& stats, double reference) {
  return (stats.std - reference) / stats.std_error_of_std;
}

KsResult two_sample_ks(std::vector<double> first, std::vector<double> second, double sigma) {
  if (first.empty() || second.empty()) {
    throw std::invalid_argument("two_sample_ks: both samples must be non-empty");
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  const double n = static_cast<double>(first.size());
  const double m = static_cast<double>(second.size());

  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < first.size() && j < second.size()) {
    const double x = std::min(first[i], second[j]);
    while (i < first.size() && first[i] <= x) ++i;
    while (j < second.size() && second[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }

  // Asymptotic Kolmogorov tail: P(D > c sqrt((n+m)/nm)) ~ 2 exp(-2 c^2).
  const double alpha = std::erfc(sigma / std::numbers::sqrt2);
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  KsResult r;
  r.statistic = d;
  r.critical = c * std::sqrt((n + m) / (n * m));
  r.consistent = d <= r.critical;
  return r;
}

} // namespace popperlab
