#include "popperlab/state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace popperlab {

namespace {

void require_width(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::invalid_argument(std::string("GaussianPairState: ") + name +
                                " must be finite and > 0, got " + std::to_string(value));
  }
}

} // namespace

GaussianPairState::GaussianPairState(double sigma_plus, double sigma_minus)
    : sigma_plus_(sigma_plus), sigma_minus_(sigma_minus) {
  require_width(sigma_plus, "sigma_plus");
  require_width(sigma_minus, "sigma_minus");
}

double GaussianPairState::position_stiffness() const {
  const double p = sigma_plus_ * sigma_plus_;
  const double m = sigma_minus_ * sigma_minus_;
  return p * m / (p + m);
}

double GaussianPairState::cross_coupling() const {
  const double p = sigma_plus_ * sigma_plus_;
  const double m = sigma_minus_ * sigma_minus_;
  return (p - m) / (p + m);
}

Complex psi_momentum(const GaussianPairState& state, double k1, double k2) {
  const double sp = state.sigma_plus();
  const double sm = state.sigma_minus();
  const double sum = k1 + k2;
  const double diff = k1 - k2;
  const double prefactor = 1.0 / std::sqrt(std::numbers::pi * sp * sm);
  return {prefactor * std::exp(-sum * sum / (4.0 * sp * sp) - diff * diff / (4.0 * sm * sm)), 0.0};
}

Complex psi_mixed(const GaussianPairState& state, double y1, double k2) {
  const double sp = state.sigma_plus();
  const double sm = state.sigma_minus();
  const double p = sp * sp;
  const double m = sm * sm;
  const double s = p + m;
  const double prefactor = std::sqrt(2.0 / std::numbers::pi * sp * sm / s);
  // exp(-(p m y1^2 + k2^2 - i (p - m) y1 k2) / (p + m))
  const double re = -(p * m * y1 * y1 + k2 * k2) / s;
  const double im = (p - m) * y1 * k2 / s;
  return prefactor * std::exp(Complex(re, im));
}

Complex psi_position(const GaussianPairState& state, double y1, double y2) {
  const double sp = state.sigma_plus();
  const double sm = state.sigma_minus();
  const double sum = y1 + y2;
  const double diff = y1 - y2;
  const double prefactor = std::sqrt(sp * sm / std::numbers::pi);
  return {prefactor * std::exp(-0.25 * (sp * sp * sum * sum + sm * sm * diff * diff)), 0.0};
}

std::vector<Complex> psi_mixed_derivatives(const GaussianPairState& state, double y1, double k2,
                                           int count) {
  std::vector<Complex> out;
  if (count <= 0) return out;
  out.reserve(static_cast<std::size_t>(count));

  // psi = C exp(-alpha y^2 + i gamma y); with u = -2 alpha y + i gamma,
  // psi^(n+1) = u psi^(n) - 2 alpha n psi^(n-1).
  const double alpha = state.position_stiffness();
  const Complex u(-2.0 * alpha * y1, state.cross_coupling() * k2);
  out.push_back(psi_mixed(state, y1, k2));
  for (int n = 0; n + 1 < count; ++n) {
    Complex next = u * out[static_cast<std::size_t>(n)];
    if (n > 0) next -= 2.0 * alpha * n * out[static_cast<std::size_t>(n - 1)];
    out.push_back(next);
  }
  return out;
}

DerivedWidths derived_widths(const GaussianPairState& state) {
  const double sp = state.sigma_plus();
  const double sm = state.sigma_minus();
  const double root = std::sqrt(state.width_sum_sq());
  DerivedWidths w{};
  w.momentum_std = 0.5 * root;
  w.position_std = root / (2.0 * sp * sm);
  w.total_momentum_std = sp;
  w.center_std = 1.0 / (2.0 * sp);
  // sp / (2 sp) is exactly 0.5 in binary floating point.
  w.heisenberg_product = sp / (2.0 * sp);
  return w;
}

} // namespace popperlab
