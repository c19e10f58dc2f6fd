#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "popperlab/conditioning.hpp"
#include "popperlab/quadrature.hpp"
#include "popperlab/state.hpp"

namespace popperlab {

// Thrown when a conditional k2 density has (numerically) no weight.
class DegenerateDensityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Mean and standard deviation of the right-photon momentum k2 under a
// detection scheme.
struct SpreadResult {
  DetectionScheme scheme;
  double half_width = 0.0;
  double mean_k2 = 0.0;
  double delta_k2 = 0.0;
  double numeric_error = 0.0; // propagated from the moment integrals
};

SpreadResult spread(const GaussianPairState& state, const SlitConfig& slit,
                    const DetectionScheme& scheme, const QuadratureSpec& spec);

// Relative correction inside the bracket of the narrow-slit expansion of the
// central-detection spread: (a^2 / 12) (sp^2 - sm^2)^2 / (sp^2 + sm^2).
double cd_small_a_correction(const GaussianPairState& state, const SlitConfig& slit);

// The expansion is treated as valid while the correction is at most 10%.
inline constexpr double kSmallSlitCorrectionLimit = 0.1;
bool cd_small_a_valid(const GaussianPairState& state, const SlitConfig& slit);

// (1/2) sqrt(sp^2 + sm^2) [1 - correction]. Throws std::domain_error when the
// bracket is not positive.
double cd_small_a_formula(const GaussianPairState& state, const SlitConfig& slit);

// Tolerance that a quadrature central spread must meet against
// cd_small_a_formula inside the validity range (relative).
double cd_small_a_tolerance(const GaussianPairState& state, const SlitConfig& slit);

// Inclusive-detection spread, sqrt(sp^2 + sm^2) / 2, independent of the slit.
double id_formula(const GaussianPairState& state);

// Central-detection spread with the slit removed: sp sm / sqrt(sp^2 + sm^2).
double cd_wide_slit_limit(const GaussianPairState& state);

// Single-slit diffraction estimate 1 / (2a) for a physical slit.
double physical_slit_estimate(const SlitConfig& slit);

// Moments of k2 for a left detector at k1 = kappa, over |Phi(kappa, k2)|^2.
struct ConditionalMoments {
  double weight = 0.0; // p(kappa) = int dk2 |Phi|^2
  double mean = 0.0;
  double variance = 0.0;
};

ConditionalMoments conditional_moments(const GaussianPairState& state, const SlitConfig& slit,
                                       double kappa, const QuadratureSpec& spec);

// Law-of-total-variance decomposition of the inclusive k2 variance over the
// left-detector momentum kappa:
//   E_kappa[v(kappa)] + Var_kappa[m(kappa)] = (inclusive spread)^2.
struct TotalVarianceReport {
  double passage_weight = 0.0;                // int dkappa p(kappa)
  double expected_conditional_variance = 0.0; // E_kappa[v]
  double variance_of_conditional_mean = 0.0;  // Var_kappa[m]
  double total = 0.0;                         // sum of the two pieces
  double inclusive_variance = 0.0;            // id_formula^2
  double residual = 0.0;                      // |total - inclusive_variance| / inclusive_variance
};

TotalVarianceReport total_variance_report(const GaussianPairState& state, const SlitConfig& slit,
                                          const QuadratureSpec& spec);

// Conditioned spread at each half-width of `half_widths` (ascending), and
// whether it strictly increases along the grid (margin 1e-9).
struct ConditionedTrend {
  double kappa = 0.0;
  std::vector<double> delta_k2;
  bool increasing_with_a = false;
};

ConditionedTrend conditioned_trend(const GaussianPairState& state, double kappa,
                                   const std::vector<double>& half_widths,
                                   const QuadratureSpec& spec);

// Scans kappa_grid in order and returns the trends; the first entry with
// increasing_with_a marks where narrowing the slit starts to reduce the
// conditioned spread.
std::vector<ConditionedTrend> scan_conditioned_trends(const GaussianPairState& state,
                                                      const std::vector<double>& kappa_grid,
                                                      const std::vector<double>& half_widths,
                                                      const QuadratureSpec& spec);

inline constexpr double kMonotoneMargin = 1e-9;

} // namespace popperlab
