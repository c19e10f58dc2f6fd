#include "popperlab/conditioning.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace popperlab {

namespace {

const double kInvSqrtTwoPi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Highest |frequency| of psi_mixed(y1, k2) along y1.
double mixed_frequency(const GaussianPairState& state, double k2) {
  return std::abs(state.cross_coupling() * k2);
}

// J_p = int_K^inf t^{-p} exp(i w t) dt by its integration-by-parts series,
// valid for w K >> p.
Complex oscillatory_tail(int p, double omega, double cutoff) {
  const Complex i_omega_k(0.0, omega * cutoff);
  Complex term = std::pow(cutoff, -p);
  Complex sum = term;
  for (int j = 0; j < 200; ++j) {
    const Complex next = term * static_cast<double>(p + j) / i_omega_k;
    if (std::abs(next) >= std::abs(term)) break; // asymptotic series starts to diverge
    term = next;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return Complex(0.0, 1.0) * std::exp(Complex(0.0, omega * cutoff)) * sum / omega;
}

} // namespace

SlitConfig::SlitConfig(double half_width) : half_width_(half_width) {
  if (!std::isfinite(half_width) || half_width <= 0.0) {
    throw std::invalid_argument("SlitConfig: half_width must be finite and > 0, got " +
                                std::to_string(half_width));
  }
}

std::string DetectionScheme::label() const {
  switch (kind) {
  case Kind::Central:
    return "central";
  case Kind::Inclusive:
    return "inclusive";
  case Kind::Conditioned:
    return "conditioned";
  }
  return "unknown";
}

Complex central_amplitude(const GaussianPairState& state, const SlitConfig& slit, double k2,
                          const QuadratureSpec& spec) {
  const double a = slit.half_width();
  auto integrand = [&](double y1) { return psi_mixed(state, y1, k2); };
  return integrate_finite(integrand, -a, a, spec, mixed_frequency(state, k2)).value;
}

Complex conditioned_amplitude(const GaussianPairState& state, const SlitConfig& slit, double kappa,
                              double k2, const QuadratureSpec& spec) {
  const double a = slit.half_width();
  auto integrand = [&](double y1) {
    return std::exp(Complex(0.0, -kappa * y1)) * psi_mixed(state, y1, k2);
  };
  const double frequency = std::abs(kappa) + mixed_frequency(state, k2);
  return kInvSqrtTwoPi * integrate_finite(integrand, -a, a, spec, frequency).value;
}

double inclusive_density(const GaussianPairState& state, const SlitConfig& slit, double k2,
                         const QuadratureSpec& spec) {
  const double a = slit.half_width();
  auto integrand = [&](double y1) { return std::norm(psi_mixed(state, y1, k2)); };
  return integrate_adaptive<double>(integrand, -a, a, spec).value;
}

double passage_probability(const GaussianPairState& state, const SlitConfig& slit,
                           const QuadratureSpec& spec) {
  const double a = slit.half_width();
  const double s_k = derived_widths(state).momentum_std;
  auto over_k2 = [&](double y1) {
    auto density = [&](double k2) { return std::norm(psi_mixed(state, y1, k2)); };
    return integrate_real_line_adaptive<double>(density, s_k, spec).value;
  };
  return integrate_adaptive<double>(over_k2, -a, a, spec).value;
}

EdgeExpansion::EdgeExpansion(const GaussianPairState& state, const SlitConfig& slit, double k2,
                             int order)
    : half_width_(slit.half_width()) {
  if (order < 1) throw std::invalid_argument("EdgeExpansion: order must be >= 1");
  const double a = half_width_;
  const auto at_upper = psi_mixed_derivatives(state, a, k2, order);
  const auto at_lower = psi_mixed_derivatives(state, -a, k2, order);

  // int f e^{-i kappa y} dy = -sum_n [f^(n) e^{-i kappa y}]_{-a}^{a} / (i kappa)^{n+1}
  // and 1 / (i kappa) = -i s with s = 1 / kappa.
  upper_.resize(static_cast<std::size_t>(order));
  lower_.resize(static_cast<std::size_t>(order));
  Complex power(0.0, -1.0); // (-i)^{n+1}
  for (int n = 0; n < order; ++n) {
    const auto idx = static_cast<std::size_t>(n);
    upper_[idx] = -at_upper[idx] * power;
    lower_[idx] = at_lower[idx] * power;
    power *= Complex(0.0, -1.0);
  }
}

Complex EdgeExpansion::amplitude(double kappa) const {
  const double s = 1.0 / kappa;
  Complex upper_poly = 0.0;
  Complex lower_poly = 0.0;
  for (std::size_t j = upper_.size(); j-- > 0;) {
    upper_poly = (upper_poly + upper_[j]) * s;
    lower_poly = (lower_poly + lower_[j]) * s;
  }
  const double a = half_width_;
  return kInvSqrtTwoPi * (std::exp(Complex(0.0, -kappa * a)) * upper_poly +
                          std::exp(Complex(0.0, kappa * a)) * lower_poly);
}

double EdgeExpansion::tail_weight(double cutoff) const {
  if (!(cutoff > 0.0)) throw std::invalid_argument("EdgeExpansion::tail_weight: cutoff must be > 0");
  const int order = static_cast<int>(upper_.size());
  const double omega = 2.0 * half_width_;

  double smooth = 0.0;
  Complex oscillating = 0.0;
  // Power s^p collects coefficient pairs (j, l) with j + l = p, j, l >= 1.
  for (int p = 2; p <= 2 * order; ++p) {
    Complex same = 0.0;
    Complex cross = 0.0;
    for (int j = std::max(1, p - order); j <= std::min(order, p - 1); ++j) {
      const auto jj = static_cast<std::size_t>(j - 1);
      const auto ll = static_cast<std::size_t>(p - j - 1);
      same += upper_[jj] * std::conj(upper_[ll]) + lower_[jj] * std::conj(lower_[ll]);
      cross += upper_[jj] * std::conj(lower_[ll]);
    }
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    // Non-oscillating terms: odd powers cancel between the two tails.
    if (p % 2 == 0) smooth += 2.0 * same.real() * std::pow(cutoff, 1 - p) / (p - 1);
    const Complex j_p = oscillatory_tail(p, omega, cutoff);
    oscillating += cross * (std::conj(j_p) + sign * j_p);
  }
  return (smooth + 2.0 * oscillating.real()) / (2.0 * std::numbers::pi);
}

double kappa_cutoff(const GaussianPairState& state, const SlitConfig& slit, double k2_max,
                    double resolution) {
  const double a = slit.half_width();
  const double alpha = state.position_stiffness();
  // Growth rate of successive edge derivatives: |u| + sqrt(2 alpha n).
  const double growth = 2.0 * alpha * a + std::abs(state.cross_coupling() * k2_max) +
                        std::sqrt(2.0 * alpha * 8.0);
  return resolution * std::max(1.0 / a, growth);
}

double conditioned_weight(const GaussianPairState& state, const SlitConfig& slit, double k2,
                          const QuadratureSpec& spec) {
  const double a = slit.half_width();
  const double cutoff = kappa_cutoff(state, slit, std::abs(k2));
  auto density = [&](double kappa) {
    return std::norm(conditioned_amplitude(state, slit, kappa, k2, spec));
  };
  const double core = integrate_adaptive<double>(density, -cutoff, cutoff, spec, 2.0 * a).value;
  return core + EdgeExpansion(state, slit, k2).tail_weight(cutoff);
}

} // namespace popperlab
