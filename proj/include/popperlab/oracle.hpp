#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "popperlab/conditioning.hpp"
#include "popperlab/quadrature.hpp"
#include "popperlab/state.hpp"

namespace popperlab {

// Monte Carlo verification of the k2 spreads, independent of the moment
// quadrature. Draw i depends only on (seed, i), so the sample stream is the
// same for any slit and any worker count.
struct OracleConfig {
  std::uint64_t n_samples = 100000; // proposals, not accepted samples
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const;
};

struct SampleStats {
  std::uint64_t n_draws = 0;
  std::uint64_t n_accepted = 0;
  double mean = 0.0;
  double std = 0.0;
  double std_error_of_std = 0.0; // std / sqrt(2 n_accepted)
  double acceptance_rate = 0.0;
  std::uint64_t envelope_violations = 0;
};

class InsufficientAcceptanceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EnvelopeViolationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Counter-based generator: uniform(seed, index, lane) in (0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t lane);
// Standard normal from two uniform lanes (Box-Muller, cosine branch).
double counter_normal(std::uint64_t seed, std::uint64_t index, std::uint32_t lane);

// Draw (y1, k2) from the factorized |psi(y1, k2)|^2 and keep k2 when
// |y1| <= a. acceptance_rate estimates passage_probability.
SampleStats sample_inclusive(const GaussianPairState& state, const SlitConfig& slit,
                             const OracleConfig& cfg);

// Accepted k2 values of sample_inclusive, in draw order.
std::vector<double> accepted_inclusive_k2(const GaussianPairState& state, const SlitConfig& slit,
                                          const OracleConfig& cfg);

// Rejection sampling of the central-detection k2 density |A(k2)|^2 under the
// envelope |A(0)|^2 exp(-2 k2^2 / (sp^2 + sm^2)).
// Throws EnvelopeViolationError if the target ever exceeds the envelope.
SampleStats sample_central(const GaussianPairState& state, const SlitConfig& slit,
                           const OracleConfig& cfg, const QuadratureSpec& spec = {});

// (stats.std - reference) / stats.std_error_of_std. |z| <= 4 is agreement.
double zscore_report(const SampleStats& stats, double reference);

inline constexpr double kAgreementSigma = 4.0;

// Two-sample Kolmogorov-Smirnov test. The critical value corresponds to a
// two-sided normal tail of `sigma` standard deviations.
struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool consistent = false;
};

KsResult two_sample_ks(std::vector<double> first, std::vector<double> second,
                       double sigma = kAgreementSigma);

} // namespace popperlab
