#pragma once

#include <complex>
#include <vector>

namespace popperlab {

using Complex = std::complex<double>;

// Entangled two-photon Gaussian pair, transverse components only, hbar = 1.
// Lengths are in millimetres and momenta in inverse millimetres.
//
// sigma_plus is the width of the total momentum k1 + k2, sigma_minus the
// width of the relative momentum k1 - k2. A small sigma_plus models a wide
// pump beam (strongly anticorrelated momenta).
class GaussianPairState {
public:
  // Throws std::invalid_argument unless both widths are finite and > 0.
  GaussianPairState(double sigma_plus, double sigma_minus);

  double sigma_plus() const { return sigma_plus_; }
  double sigma_minus() const { return sigma_minus_; }

  // sigma_plus^2 + sigma_minus^2, the combination that appears everywhere.
  double width_sum_sq() const { return sigma_plus_ * sigma_plus_ + sigma_minus_ * sigma_minus_; }

  // Coefficient of -y1^2 in the exponent of the mixed representation.
  double position_stiffness() const;
  // Coefficient of i*y1*k2 in the exponent of the mixed representation.
  double cross_coupling() const;

private:
  double sigma_plus_;
  double sigma_minus_;
};

struct DerivedWidths {
  double momentum_std;       // std of k1 or k2 alone
  double position_std;       // std of y1 in |psi(y1, k2)|^2
  double total_momentum_std; // std of k1 + k2
  double center_std;         // std of (y1 + y2) / 2
  double heisenberg_product; // total_momentum_std * center_std, always 1/2
};

// Amplitude in momentum space psi(k1, k2). Units: mm. Real and positive.
Complex psi_momentum(const GaussianPairState& state, double k1, double k2);

// Mixed representation psi(y1, k2): Fourier transform over k1 only.
// Dimensionless.
Complex psi_mixed(const GaussianPairState& state, double y1, double k2);

// Position-space amplitude psi(y1, y2). Units: 1/mm. Real and positive.
Complex psi_position(const GaussianPairState& state, double y1, double y2);

// d^n psi_mixed / d y1^n for n = 0 .. count-1 at (y1, k2), from the closed
// form exponent. Used by the large-kappa edge expansion.
std::vector<Complex> psi_mixed_derivatives(const GaussianPairState& state, double y1, double k2,
                                           int count);

DerivedWidths derived_widths(const GaussianPairState& state);

} // namespace popperlab
