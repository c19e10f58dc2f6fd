// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "popperlab/observables.hpp"
#include "popperlab/oracle.hpp"
#include "popperlab/sweep.hpp"

using namespace popperlab;

namespace {

const QuadratureSpec kSpec;
const GaussianPairState kReference(0.6, 0.8);

struct Outcome {
  bool pass = true;
  std::string detail;
};

// printf into a std::string.
template <class... Args>
std::string fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int failures = 0;

void criterion(const char* name, double time_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0.0 && seconds >= time_limit) {
    out.pass = false;
    out.detail += fmt(" [runtime limit %.0f s exceeded]", time_limit);
  }
  std::printf("%s  %-28s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
    sxx += std::log(x[i]) * std::log(x[i]);
    sxy += std::log(x[i]) * std::log(y[i]);
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <std::size_t N, class F>
RealVector<N> integrate_plane(const F& f, double width_x, double width_y) {
  auto outer = [&](double x) {
    auto inner = [&](double y) { return f(x, y); };
    return integrate_real_line_adaptive<RealVector<N>>(inner, width_y, kSpec).value;
  };
  return integrate_real_line_adaptive<RealVector<N>>(outer, width_x, kSpec).value;
}

// (2 pi)^{-1} int dk1 dk2 exp(i (k1 y1 + k2 y2)) psi(k1, k2), trapezoid rule.
Complex position_from_momentum(const GaussianPairState& s, double y1, double y2) {
  const double h = 0.02;
  const int n = 400;
  Complex sum = 0.0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      sum += std::exp(Complex(0.0, h * (i * y1 + j * y2))) * psi_momentum(s, h * i, h * j);
    }
  }
  return sum * h * h / (2.0 * std::numbers::pi);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome inclusive_reproduction() {
  const int n = 20;
  double worst = 0.0, lo = INFINITY, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = 0.01 * std::pow(1000.0, i / (n - 1.0));
    const double d = spread(kReference, SlitConfig(a), DetectionScheme::inclusive(), kSpec).delta_k2;
    worst = std::max(worst, std::abs(d - 0.5));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double variation = (hi - lo) / lo;
  return {worst <= 1e-8 && variation <= 1e-9,
          fmt("max |spread - 0.5| = %.2e (<= 1e-8), relative variation = %.2e (<= 1e-9)", worst,
              variation)};
}

Outcome small_slit_expansion() {
  std::vector<double> widths = {0.05, 0.1, 0.2};
  std::vector<double> gaps;
  double worst = 0.0;
  for (double a : widths) {
    const double numeric =
        spread(kReference, SlitConfig(a), DetectionScheme::central(), kSpec).delta_k2;
    const double gap = std::abs(numeric - cd_small_a_formula(kReference, SlitConfig(a)));
    gaps.push_back(gap);
    worst = std::max(worst, gap / numeric);
  }
  const double slope = log_log_slope(widths, gaps);
  return {worst <= 1e-4 && std::abs(slope - 4.0) <= 0.5,
          fmt("max relative gap = %.3e (<= 1e-4), log-log slope = %.4f (4 +- 0.5)", worst, slope)};
}

Outcome popper_direction() {
  std::vector<double> d;
  for (double a : {0.1, 0.2, 0.4, 0.8}) {
    d.push_back(spread(kReference, SlitConfig(a), DetectionScheme::central(), kSpec).delta_k2);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!(d[i] < d[i - 1] - kMonotoneMargin)) decreasing = false;
  }
  const double wide_a = 15.0 * derived_widths(kReference).position_std;
  const double wide =
      spread(kReference, SlitConfig(wide_a), DetectionScheme::central(), kSpec).delta_k2;
  const double gap = std::abs(wide - cd_wide_slit_limit(kReference));
  return {decreasing && gap <= 1e-6,
          fmt("spreads %.9f > %.9f > %.9f > %.9f; |spread(15 s_y) - 0.48| = %.2e (<= 1e-6)", d[0],
              d[1], d[2], d[3], gap)};
}

Outcome parseval() {
  const SlitConfig slit(0.7);
  double worst = 0.0;
  for (double k2 : {0.0, 0.3, 1.0}) {
    const double lhs = conditioned_weight(kReference, slit, k2, kSpec);
    const double rhs = inclusive_density(kReference, slit, k2, kSpec);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return {worst <= 1e-8, fmt("max relative gap = %.2e (<= 1e-8)", worst)};
}

Outcome compensation() {
  std::string detail;
  bool pass = true;
  for (double a : {0.5, 1.0}) {
    const auto r = total_variance_report(kReference, SlitConfig(a), kSpec);
    detail += fmt("a=%.1f: E[v]=%.8f Var[m]=%.8f residual=%.2e; ", a,
                  r.expected_conditional_variance, r.variance_of_conditional_mean, r.residual);
    if (!(r.residual <= 1e-6)) pass = false;
  }

  const double s_k = derived_widths(kReference).momentum_std;
  const std::vector<double> grid = {0.1, 0.4, 0.8};
  bool exists = false;
  for (double m : {1.0, 2.0, 3.0}) {
    const auto t = conditioned_trend(kReference, m * s_k, grid, kSpec);
    detail += fmt("kappa=%.1f: %.6f %.6f %.6f %s; ", m * s_k, t.delta_k2[0], t.delta_k2[1],
                  t.delta_k2[2], t.increasing_with_a ? "increasing" : "not increasing");
    exists = exists || t.increasing_with_a;
  }
  if (!exists) {
    pass = false;
    detail += "no kappa in {1,2,3} s_k has spread increasing in a";
  }

  // Where a reversal does occur: first kappa (step 0.05) at which the
  // conditioned spread at a = 0.8 exceeds the one at a = 0.4.
  std::vector<double> scan_grid;
  for (int i = 1; i <= 200; ++i) scan_grid.push_back(0.05 * i);
  double first = NAN;
  for (const auto& t : scan_conditioned_trends(kReference, scan_grid, {0.4, 0.8}, kSpec)) {
    if (t.increasing_with_a) {
      first = t.kappa;
      break;
    }
  }
  if (std::isnan(first)) {
    detail += "; scan kappa <= 10 over a = 0.4 -> 0.8: no reversal";
  } else {
    detail += fmt("; scan over a = 0.4 -> 0.8: first reversal at kappa = %.2f (%.1f s_k)", first,
                  first / s_k);
  }
  return {pass, detail};
}

Outcome state_integrity() {
  const auto w = derived_widths(kReference);
  auto norm1 = [](double v) {
    RealVector<1> r;
    r[0] = v;
    return r;
  };
  const double nk = integrate_plane<1>(
      [&](double k1, double k2) { return norm1(std::norm(psi_momentum(kReference, k1, k2))); },
      w.momentum_std, w.momentum_std)[0];
  const double nm = integrate_plane<1>(
      [&](double y1, double k2) { return norm1(std::norm(psi_mixed(kReference, y1, k2))); },
      w.position_std, w.momentum_std)[0];
  const double ny = integrate_plane<1>(
      [&](double y1, double y2) { return norm1(std::norm(psi_position(kReference, y1, y2))); },
      w.position_std, w.position_std)[0];
  const double norm_gap = std::max({std::abs(nk - 1.0), std::abs(nm - 1.0), std::abs(ny - 1.0)});

  double fourier = 0.0;
  for (double y1 : {-1.0, 0.0, 0.4, 1.5}) {
    for (double y2 : {-0.2, 0.5, 2.0}) {
      fourier = std::max(fourier, std::abs(psi_position(kReference, y1, y2) -
                                           position_from_momentum(kReference, y1, y2)));
    }
  }

  const auto km = integrate_plane<2>(
      [&](double k1, double k2) {
        const double d = std::norm(psi_momentum(kReference, k1, k2));
        RealVector<2> r;
        r[0] = d;
        r[1] = (k1 + k2) * (k1 + k2) * d;
        return r;
      },
      w.momentum_std, w.momentum_std);
  const auto cm = integrate_plane<2>(
      [&](double y1, double y2) {
        const double d = std::norm(psi_position(kReference, y1, y2));
        const double c = 0.5 * (y1 + y2);
        RealVector<2> r;
        r[0] = d;
        r[1] = c * c * d;
        return r;
      },
      w.position_std, w.position_std);
  const double product = std::sqrt(km[1] / km[0]) * std::sqrt(cm[1] / cm[0]);
  const bool exact = w.heisenberg_product == 0.5;
  return {norm_gap <= 1e-9 && fourier <= 1e-8 && exact && std::abs(product - 0.5) <= 1e-10,
          fmt("norm gap = %.1e (<= 1e-9), Fourier max error = %.1e (<= 1e-8), product %s 0.5, "
              "quadrature product - 0.5 = %.1e (<= 1e-10)",
              norm_gap, fourier, exact ? "==" : "!=", product - 0.5)};
}

Outcome monte_carlo() {
  const SlitConfig slit(0.5);
  OracleConfig cfg;
  cfg.n_samples = 100000;
  cfg.seed = 1;
  const auto inc = sample_inclusive(kReference, slit, cfg);
  const auto cen = sample_central(kReference, slit, cfg, kSpec);
  const double z_inc = zscore_report(
      inc, spread(kReference, slit, DetectionScheme::inclusive(), kSpec).delta_k2);
  const double z_cen =
      zscore_report(cen, spread(kReference, slit, DetectionScheme::central(), kSpec).delta_k2);
  return {std::abs(z_inc) <= kAgreementSigma && std::abs(z_cen) <= kAgreementSigma &&
              cen.envelope_violations == 0,
          fmt("inclusive z = %+.3f, central z = %+.3f (|z| <= 4), envelope violations = %llu",
              z_inc, z_cen, static_cast<unsigned long long>(cen.envelope_violations))};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "popper_acceptance";
  fs::create_directories(dir);
  bool same_files = true;
  for (const char* format : {"csv", "json"}) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / fmt("run%d.%s", run, format);
      const std::string cmd = std::string(POPPER_SWEEP_EXE) +
                              " --preset strekalov --mc-samples 5000 --format " + format +
                              (run == 1 ? " --jobs 3" : "") + " --out " + out.string();
      if (std::system(cmd.c_str()) != 0) return {false, "popper_sweep failed: " + cmd};
      outputs[run] = read_file(out);
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) same_files = false;
  }
  fs::remove_all(dir);

  OracleConfig cfg;
  cfg.n_samples = 100000;
  cfg.seed = 7;
  bool same_stats = true;
  SampleStats base = sample_inclusive(kReference, SlitConfig(0.5), cfg);
  for (unsigned workers : {2u, 4u, 7u}) {
    cfg.workers = workers;
    const auto s = sample_inclusive(kReference, SlitConfig(0.5), cfg);
    if (s.std != base.std || s.mean != base.mean || s.n_accepted != base.n_accepted) {
      same_stats = false;
    }
  }
  return {same_files && same_stats,
          fmt("sweep outputs byte-identical: %s, MC stats identical for 1/2/4/7 workers: %s",
              same_files ? "yes" : "no", same_stats ? "yes" : "no")};
}

} // namespace

int main() {
  criterion("inclusive-reproduction", 5.0, inclusive_reproduction);
  criterion("small-slit-expansion", 10.0, small_slit_expansion);
  criterion("popper-direction", 0.0, popper_direction);
  criterion("parseval-equivalence", 0.0, parseval);
  criterion("compensation", 0.0, compensation);
  criterion("state-integrity", 0.0, state_integrity);
  criterion("monte-carlo-concordance", 30.0, monte_carlo);
  criterion("determinism", 0.0, determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
