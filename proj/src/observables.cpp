#include "popperlab/observables.hpp"

#include <cmath>
#include <numbers>

namespace popperlab {

namespace {

using Moments3 = RealVector<3>;

// Frequency in k2 of |Phi|^2 or |central amplitude|^2 at half-width a.
double density_frequency(const GaussianPairState& state, const SlitConfig& slit) {
  return 2.0 * std::abs(state.cross_coupling()) * slit.half_width();
}

struct MomentSummary {
  double weight;
  double mean;
  double variance;
  double error;
};

template <class Density>
MomentSummary k2_moments(const GaussianPairState& state, const Density& density,
                         double frequency, const QuadratureSpec& spec) {
  const double s_k = derived_widths(state).momentum_std;
  auto integrand = [&](double k2) {
    const double d = density(k2);
    Moments3 m;
    m[0] = d;
    m[1] = k2 * d;
    m[2] = k2 * k2 * d;
    return m;
  };
  const auto r = integrate_real_line_adaptive<Moments3>(integrand, s_k, spec, frequency);
  const double w = r.value[0];
  if (!std::isfinite(w) || w <= 1e-280) {
    throw DegenerateDensityError("k2 density has no weight (total " + std::to_string(w) + ")");
  }
  const double mean = r.value[1] / w;
  const double second = r.value[2] / w;
  const double variance = second - mean * mean;

  const double e = r.error_estimate;
  const double mean_err = (e + std::abs(mean) * e) / w;
  const double var_err = (e + std::abs(second) * e) / w + 2.0 * std::abs(mean) * mean_err;
  return {w, mean, variance, var_err};
}

} // namespace

SpreadResult spread(const GaussianPairState& state, const SlitConfig& slit,
                    const DetectionScheme& scheme, const QuadratureSpec& spec) {
  MomentSummary m{};
  switch (scheme.kind) {
  case DetectionScheme::Kind::Central:
    m = k2_moments(
        state, [&](double k2) { return std::norm(central_amplitude(state, slit, k2, spec)); },
        density_frequency(state, slit), spec);
    break;
  case DetectionScheme::Kind::Inclusive:
    m = k2_moments(
        state, [&](double k2) { return inclusive_density(state, slit, k2, spec); }, 0.0, spec);
    break;
  case DetectionScheme::Kind::Conditioned:
    m = k2_moments(
        state,
        [&](double k2) {
          return std::norm(conditioned_amplitude(state, slit, scheme.kappa, k2, spec));
        },
        density_frequency(state, slit), spec);
    break;
  }
  if (!(m.variance > 0.0)) {
    throw DegenerateDensityError("k2 variance is not positive for scheme " + scheme.label());
  }
  SpreadResult out;
  out.scheme = scheme;
  out.half_width = slit.half_width();
  out.mean_k2 = m.mean;
  out.delta_k2 = std::sqrt(m.variance);
  out.numeric_error = m.error / (2.0 * out.delta_k2);
  return out;
}

double cd_small_a_correction(const GaussianPairState& state, const SlitConfig& slit) {
  const double p = state.sigma_plus() * state.sigma_plus();
  const double m = state.sigma_minus() * state.sigma_minus();
  const double a = slit.half_width();
  return a * a / 12.0 * (p - m) * (p - m) / (p + m);
}

bool cd_small_a_valid(const GaussianPairState& state, const SlitConfig& slit) {
  return cd_small_a_correction(state, slit) <= kSmallSlitCorrectionLimit;
}

double cd_small_a_formula(const GaussianPairState& state, const SlitConfig& slit) {
  const double bracket = 1.0 - cd_small_a_correction(state, slit);
  if (!(bracket > 0.0)) {
    throw std::domain_error("cd_small_a_formula: slit too wide for the narrow-slit expansion "
                            "(bracket <= 0)");
  }
  return 0.5 * std::sqrt(state.width_sum_sq()) * bracket;
}

double cd_small_a_tolerance(const GaussianPairState& state, const SlitConfig& slit) {
  // Leading omitted terms, relative to the spread: 0.9 c^2 + (4/15) c alpha a^2.
  const double c = cd_small_a_correction(state, slit);
  const double a = slit.half_width();
  const double next = 0.9 * c * c + 4.0 / 15.0 * c * state.position_stiffness() * a * a;
  return 2.0 * next + 1e-9;
}

double id_formula(const GaussianPairState& state) { return 0.5 * std::sqrt(state.width_sum_sq()); }

double cd_wide_slit_limit(const GaussianPairState& state) {
  return state.sigma_plus() * state.sigma_minus() / std::sqrt(state.width_sum_sq());
}

double physical_slit_estimate(const SlitConfig& slit) { return 1.0 / (2.0 * slit.half_width()); }

ConditionalMoments conditional_moments(const GaussianPairState& state, const SlitConfig& slit,
                                       double kappa, const QuadratureSpec& spec) {
  const auto m = k2_moments(
      state,
      [&](double k2) { return std::norm(conditioned_amplitude(state, slit, kappa, k2, spec)); },
      density_frequency(state, slit), spec);
  return {m.weight, m.mean, m.variance};
}

TotalVarianceReport total_variance_report(const GaussianPairState& state, const SlitConfig& slit,
                                          const QuadratureSpec& spec) {
  const double a = slit.half_width();
  const double s_k = derived_widths(state).momentum_std;
  const double k2_max = spec.tail_cutoff_multiplier * s_k;
  // Coarser than the default: the report needs ~1e-6, and the core cost grows
  // as the square of the cutoff.
  const double cutoff = kappa_cutoff(state, slit, k2_max, 8.0);
  const double k2_frequency = density_frequency(state, slit);
  const double kappa_frequency = 2.0 * a;

  // Per-kappa k2 moments (p, p m, p (v + m^2)) of a joint density.
  auto joint_moments = [&](auto&& amplitude) {
    auto integrand = [&](double k2) {
      const double d = std::norm(amplitude(k2));
      Moments3 m;
      m[0] = d;
      m[1] = k2 * d;
      m[2] = k2 * k2 * d;
      return m;
    };
    return integrate_real_line_adaptive<Moments3>(integrand, s_k, spec, k2_frequency).value;
  };
  // (p, M1, M2, M1^2 / p) so that the nonlinear piece rides along.
  auto with_ratio = [](const Moments3& m) {
    RealVector<4> out;
    out[0] = m[0];
    out[1] = m[1];
    out[2] = m[2];
    out[3] = m[0] > 0.0 ? m[1] * m[1] / m[0] : 0.0;
    return out;
  };

  QuadratureSpec wide = spec;
  wide.max_subdivisions =
      spec.max_subdivisions + static_cast<int>(std::ceil(kappa_frequency * 32.0 * cutoff / std::numbers::pi));

  // Core |kappa| <= K with exact amplitudes.
  auto core_integrand = [&](double kappa) {
    return with_ratio(joint_moments([&](double k2) {
      return conditioned_amplitude(state, slit, kappa, k2, spec);
    }));
  };
  const auto core =
      integrate_adaptive<RealVector<4>>(core_integrand, -cutoff, cutoff, wide, kappa_frequency).value;

  // Linear tails |kappa| > K, integrated term by term in kappa.
  auto tail_integrand = [&](double k2) {
    const double t = EdgeExpansion(state, slit, k2).tail_weight(cutoff);
    Moments3 m;
    m[0] = t;
    m[1] = k2 * t;
    m[2] = k2 * k2 * t;
    return m;
  };
  const auto linear_tail = integrate_real_line_adaptive<Moments3>(tail_integrand, s_k, spec).value;

  // Nonlinear tail of M1^2 / p: quadrature of the edge expansion out to
  // 16 K, then the period-averaged 1/kappa^2 remainder.
  auto asymptotic_ratio = [&](double kappa) {
    const auto m = joint_moments([&](double k2) { return EdgeExpansion(state, slit, k2).amplitude(kappa); });
    return m[0] > 0.0 ? m[1] * m[1] / m[0] : 0.0;
  };
  const double far = 16.0 * cutoff;
  double ratio_tail = 0.0;
  for (double side : {1.0, -1.0}) {
    auto f = [&](double t) { return asymptotic_ratio(side * t); };
    ratio_tail += integrate_adaptive<double>(f, cutoff, far, wide, kappa_frequency).value;
    const double period = std::numbers::pi / a;
    auto scaled = [&](double t) { return t * t * f(t); };
    const double mean_scaled = integrate_adaptive<double>(scaled, far, far + period, spec).value / period;
    ratio_tail += mean_scaled / far;
  }

  const double w = core[0] + linear_tail[0];
  const double m1 = core[1] + linear_tail[1];
  const double m2 = core[2] + linear_tail[2];
  const double ratio = core[3] + ratio_tail;

  TotalVarianceReport r;
  r.passage_weight = w;
  r.expected_conditional_variance = (m2 - ratio) / w;
  const double mean = m1 / w;
  r.variance_of_conditional_mean = ratio / w - mean * mean;
  r.total = r.expected_conditional_variance + r.variance_of_conditional_mean;
  const double id = id_formula(state);
  r.inclusive_variance = id * id;
  r.residual = std::abs(r.total - r.inclusive_variance) / r.inclusive_variance;
  return r;
}

ConditionedTrend conditioned_trend(const GaussianPairState& state, double kappa,
                                   const std::vector<double>& half_widths,
                                   const QuadratureSpec& spec) {
  ConditionedTrend t;
  t.kappa = kappa;
  for (double a : half_widths) {
    t.delta_k2.push_back(
        spread(state, SlitConfig(a), DetectionScheme::conditioned(kappa), spec).delta_k2);
  }
  t.increasing_with_a = t.delta_k2.size() >= 2;
  for (std::size_t i = 1; i < t.delta_k2.size(); ++i) {
    if (!(t.delta_k2[i] > t.delta_k2[i - 1] + kMonotoneMargin)) t.increasing_with_a = false;
  }
  return t;
}

std::vector<ConditionedTrend> scan_conditioned_trends(const GaussianPairState& state,
                                                      const std::vector<double>& kappa_grid,
                                                      const std::vector<double>& half_widths,
                                                      const QuadratureSpec& spec) {
  std::vector<ConditionedTrend> out;
  out.reserve(kappa_grid.size());
  for (double kappa : kappa_grid) out.push_back(conditioned_trend(state, kappa, half_widths, spec));
  return out;
}

} // namespace popperlab
