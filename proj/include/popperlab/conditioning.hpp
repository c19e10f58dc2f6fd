#pragma once

#include <string>
#include <vector>

#include "popperlab/quadrature.hpp"
#include "popperlab/state.hpp"

namespace popperlab {

// Left slit passing -a <= y1 <= +a.
class SlitConfig {
public:
  // Throws std::invalid_argument unless half_width is finite and > 0.
  explicit SlitConfig(double half_width);
  double half_width() const { return half_width_; }

private:
  double half_width_;
};

// How the left photon is detected after the slit.
//   Central     - on-axis detector only, k1 = 0 (coherent sum over slit paths)
//   Inclusive   - whole left array (incoherent sum over slit positions)
//   Conditioned - a single detector at k1 = kappa
struct DetectionScheme {
  enum class Kind { Central, Inclusive, Conditioned };

  Kind kind = Kind::Central;
  double kappa = 0.0;

  static DetectionScheme central() { return {Kind::Central, 0.0}; }
  static DetectionScheme inclusive() { return {Kind::Inclusive, 0.0}; }
  static DetectionScheme conditioned(double kappa) { return {Kind::Conditioned, kappa}; }

  // "central", "inclusive" or "conditioned".
  std::string label() const;
};

// int_{-a}^{+a} dy1 psi(y1, k2). Unnormalized.
Complex central_amplitude(const GaussianPairState& state, const SlitConfig& slit, double k2,
                          const QuadratureSpec& spec);

// (2 pi)^{-1/2} int_{-a}^{+a} dy1 exp(-i kappa y1) psi(y1, k2): amplitude for
// the left photon to be found with momentum kappa after the slit.
Complex conditioned_amplitude(const GaussianPairState& state, const SlitConfig& slit, double kappa,
                              double k2, const QuadratureSpec& spec);

// int_{-a}^{+a} dy1 |psi(y1, k2)|^2.
double inclusive_density(const GaussianPairState& state, const SlitConfig& slit, double k2,
                         const QuadratureSpec& spec);

// Probability that the left photon passes the slit (coincidence normalization).
double passage_probability(const GaussianPairState& state, const SlitConfig& slit,
                           const QuadratureSpec& spec);

// Asymptotic form of conditioned_amplitude for |kappa| -> infinity at fixed k2.
//
// Repeated integration by parts over the slit gives
//   Phi ~ (2 pi)^{-1/2} [exp(-i kappa a) A(1/kappa) + exp(+i kappa a) B(1/kappa)]
// with A, B polynomials whose coefficients are the y1-derivatives of psi at
// the slit edges. The box edges make |Phi|^2 fall off only as 1/kappa^2, so
// integrals over kappa need this expansion to close their tails.
class EdgeExpansion {
public:
  EdgeExpansion(const GaussianPairState& state, const SlitConfig& slit, double k2, int order = 8);

  Complex amplitude(double kappa) const;

  // int_{|kappa| > cutoff} |Phi(kappa, k2)|^2 dkappa, term by term.
  double tail_weight(double cutoff) const;

private:
  double half_width_;
  // Coefficients of s^1 .. s^order, index 0 is s^1.
  std::vector<Complex> upper_;
  std::vector<Complex> lower_;
};

// |kappa| beyond which EdgeExpansion is accurate for every |k2| <= k2_max.
// Successive expansion terms shrink by roughly 1 / resolution; the default
// leaves the tail accurate to ~1e-13 relative.
double kappa_cutoff(const GaussianPairState& state, const SlitConfig& slit, double k2_max,
                    double resolution = 40.0);

// int dkappa |Phi(kappa, k2)|^2 over the whole real line: adaptive quadrature
// on [-K, K] plus the edge-expansion tail. Equals inclusive_density(k2) when
// the left-side measurement choice does not affect right-side statistics.
double conditioned_weight(const GaussianPairState& state, const SlitConfig& slit, double k2,
                          const QuadratureSpec& spec);

} // namespace popperlab
