#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace popperlab {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  // Number of Gaussian widths kept on each side by integrate_real_line.
  double tail_cutoff_multiplier = 10.0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Small fixed-size real vector so several moments of one integrand can be
// integrated in a single adaptive pass.
template <std::size_t N>
struct RealVector {
  std::array<double, N> v{};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  RealVector& operator+=(const RealVector& o) {
    for (std::size_t i = 0; i < N; ++i) v[i] += o.v[i];
    return *this;
  }
  RealVector& operator-=(const RealVector& o) {
    for (std::size_t i = 0; i < N; ++i) v[i] -= o.v[i];
    return *this;
  }
  RealVector& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
  friend RealVector operator+(RealVector a, const RealVector& b) { return a += b; }
  friend RealVector operator-(RealVector a, const RealVector& b) { return a -= b; }
  friend RealVector operator*(RealVector a, double s) { return a *= s; }
  friend RealVector operator*(double s, RealVector a) { return a *= s; }
};

template <class V>
struct BasicIntegralResult {
  V value{};
  double error_estimate = 0.0;
  int subdivisions_used = 0;
};

using IntegralResult = BasicIntegralResult<std::complex<double>>;

// Raised when max_subdivisions is exhausted (or the real-line tail is too
// heavy). Carries the best estimate obtained so far.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double best_magnitude, double best_error)
      : std::runtime_error(what), best_magnitude_(best_magnitude), best_error_(best_error) {}

  double best_magnitude() const { return best_magnitude_; }
  double best_error() const { return best_error_; }

private:
  double best_magnitude_;
  double best_error_;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }
template <std::size_t N>
double magnitude(const RealVector<N>& x) {
  double m = 0.0;
  for (double c : x.v) m = std::max(m, std::abs(c));
  return m;
}

// 21-point Kronrod extension of the 10-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715059524625, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for kKronrodNodes[1], [3], [5], [7], [9].
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V>
struct Panel {
  double lo;
  double hi;
  V value;
  double error;
};

template <class V, class F>
Panel<V> gauss_kronrod_21(const F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<V, 21> samples;
  samples[10] = f(center);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    samples[j] = f(center - dx);
    samples[20 - j] = f(center + dx);
  }

  V kronrod = samples[10] * kKronrodWeights[10];
  V gauss{};
  for (std::size_t j = 0; j < 10; ++j) {
    const V pair = samples[j] + samples[20 - j];
    kronrod += pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss += pair * kGaussWeights[j / 2];
  }

  // Mean absolute deviation, as in QUADPACK's qk21 error scaling.
  const V mean = kronrod * 0.5;
  double asc = magnitude(samples[10] - mean) * kKronrodWeights[10];
  for (std::size_t j = 0; j < 10; ++j) {
    asc += (magnitude(samples[j] - mean) + magnitude(samples[20 - j] - mean)) * kKronrodWeights[j];
  }

  kronrod *= half;
  gauss *= half;
  asc *= std::abs(half);

  double err = magnitude(kronrod - gauss);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  return {lo, hi, kronrod, err};
}

template <class V>
struct ErrorOrder {
  bool operator()(const Panel<V>& a, const Panel<V>& b) const { return a.error < b.error; }
};

} // namespace detail

// Globally adaptive Gauss-Kronrod (10/21) integration of f over [lo, hi].
//
// `frequency` is the largest angular frequency present in f (0 for
// non-oscillatory integrands); the interval is pre-split into
// ceil(frequency * (hi - lo) / pi) panels so that oscillations are sampled
// before any error estimate is trusted.
//
// The result is a deterministic function of the inputs.
template <class V, class F>
BasicIntegralResult<V> integrate_adaptive(const F& f, double lo, double hi,
                                          const QuadratureSpec& spec, double frequency = 0.0) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("integrate_finite: requires lo <= hi");
  }
  BasicIntegralResult<V> out;
  if (lo == hi) return out;

  using detail::Panel;
  std::priority_queue<Panel<V>, std::vector<Panel<V>>, detail::ErrorOrder<V>> queue;

  int initial = 1;
  if (frequency > 0.0) {
    const double wanted = std::ceil(std::abs(frequency) * (hi - lo) / std::numbers::pi);
    initial = static_cast<int>(std::clamp(wanted, 1.0, static_cast<double>(spec.max_subdivisions)));
  }

  V total{};
  double total_err = 0.0;
  const double step = (hi - lo) / initial;
  for (int i = 0; i < initial; ++i) {
    const double a = lo + step * i;
    const double b = (i + 1 == initial) ? hi : lo + step * (i + 1);
    auto p = detail::gauss_kronrod_21<V>(f, a, b);
    total += p.value;
    total_err += p.error;
    queue.push(std::move(p));
  }

  int panels = initial;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total)); };

  while (total_err > tolerance()) {
    if (panels >= spec.max_subdivisions) {
      throw QuadratureError("integrate_finite: tolerance not met after " +
                                std::to_string(panels) + " subdivisions on [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]",
                            detail::magnitude(total), total_err);
    }
    Panel<V> worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::gauss_kronrod_21<V>(f, worst.lo, mid);
    auto right = detail::gauss_kronrod_21<V>(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
    ++panels;
  }

  // Re-sum in positional order so the value does not carry the running
  // add/subtract round-off.
  std::vector<Panel<V>> all;
  all.reserve(queue.size());
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  V value{};
  double err = 0.0;
  for (const auto& p : all) {
    value += p.value;
    err += p.error;
  }
  out.value = value;
  out.error_estimate = err;
  out.subdivisions_used = panels;
  return out;
}

// Integral over the whole real line of an integrand whose modulus is bounded
// by a Gaussian of width `gaussian_width` beyond the cutoff. The range is
// truncated to +-C * gaussian_width (C = spec.tail_cutoff_multiplier) and the
// discarded Gaussian tail mass is added to the error estimate.
template <class V, class F>
BasicIntegralResult<V> integrate_real_line_adaptive(const F& f, double gaussian_width,
                                                    const QuadratureSpec& spec,
                                                    double frequency = 0.0) {
  if (!(gaussian_width > 0.0) || !std::isfinite(gaussian_width)) {
    throw std::invalid_argument("integrate_real_line: gaussian_width must be finite and > 0");
  }
  const double c = spec.tail_cutoff_multiplier;
  const double cutoff = c * gaussian_width;
  auto result = integrate_adaptive<V>(f, -cutoff, cutoff, spec, frequency);

  // Mills-ratio bound: int_X^inf exp(-x^2 / 2w^2) dx <= w^2 / X * exp(-X^2 / 2w^2).
  const double tail = (detail::magnitude(f(cutoff)) + detail::magnitude(f(-cutoff))) *
                      gaussian_width / c;
  result.error_estimate += tail;
  const double tol = std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(result.value));
  if (result.error_estimate > tol) {
    throw QuadratureError("integrate_real_line: truncated tail mass exceeds tolerance "
                          "(increase tail_cutoff_multiplier)",
                          detail::magnitude(result.value), result.error_estimate);
  }
  return result;
}

// Complex-valued entry points; real integrands are promoted.
template <class F>
IntegralResult integrate_finite(const F& f, double lo, double hi, const QuadratureSpec& spec,
                                double frequency = 0.0) {
  return integrate_adaptive<std::complex<double>>(
      [&](double x) { return std::complex<double>(f(x)); }, lo, hi, spec, frequency);
}

template <class F>
IntegralResult integrate_real_line(const F& f, double gaussian_width, const QuadratureSpec& spec,
                                   double frequency = 0.0) {
  return integrate_real_line_adaptive<std::complex<double>>(
      [&](double x) { return std::complex<double>(f(x)); }, gaussian_width, spec, frequency);
}

} // namespace popperlab
