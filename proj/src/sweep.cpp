#include "popperlab/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "popperlab/observables.hpp"

#ifndef POPPERLAB_VERSION
#define POPPERLAB_VERSION "0.0.0"
#endif

namespace popperlab {

namespace {

struct Preset {
  const char* name;
  double sigma_plus;
  double sigma_minus;
  double a_min;
  double a_max;
  int a_steps;
};

// strekalov: wide-pump regime sigma_plus << sigma_minus, slit widths
// 0.1 .. 1.1 mm in 0.1 mm steps.
constexpr Preset kPresets[] = {
    {"symmetric", 1.0, 1.0, 0.05, 1.0, 20},
    {"strekalov", 0.01, 1.0, 0.05, 0.55, 11},
};

const Preset* find_preset(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return &p;
  }
  return nullptr;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* spacing_name(Spacing s) { return s == Spacing::Linear ? "linear" : "log"; }
const char* format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

const char* version() { return POPPERLAB_VERSION; }

void SweepConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ConfigError(key, "must be finite and > 0, got " + format_double(v));
    }
  };
  positive(sigma_plus, "sigma-plus");
  positive(sigma_minus, "sigma-minus");
  positive(a_min, "a-min");
  positive(a_max, "a-max");
  if (!(a_min < a_max)) {
    throw ConfigError("a-max", "must be greater than a-min (" + format_double(a_min) + ")");
  }
  if (a_steps < 2) throw ConfigError("a-steps", "must be >= 2");
  if (scheme.kind == DetectionScheme::Kind::Conditioned && !std::isfinite(scheme.kappa)) {
    throw ConfigError("kappa", "must be finite");
  }
  try {
    quadrature.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.rfind("rel_tol", 0) == 0 ? "rel-tol" : "tail-cutoff", what);
  }
  if (mc) {
    if (mc->n_samples < 1000) throw ConfigError("mc-samples", "must be >= 1000");
    if (scheme.kind == DetectionScheme::Kind::Conditioned) {
      throw ConfigError("mc-samples", "Monte Carlo is available for central and inclusive schemes");
    }
  }
  if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
}

std::vector<double> SweepConfig::half_widths() const {
  std::vector<double> out(static_cast<std::size_t>(a_steps));
  const double last = static_cast<double>(a_steps - 1);
  for (int i = 0; i < a_steps; ++i) {
    const double t = i / last;
    out[static_cast<std::size_t>(i)] = spacing == Spacing::Linear
                                           ? a_min + (a_max - a_min) * t
                                           : a_min * std::exp(std::log(a_max / a_min) * t);
  }
  out.front() = a_min;
  out.back() = a_max;
  return out;
}

SweepConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Slit-width sweep of the right-photon momentum spread"};
  app.set_config("--config", "", "Flat `key = value` file with the same keys as the long flags");

  std::string preset;
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
  std::string scheme = "central";
  double kappa = 0.0;
  double a_min = 0.05;
  double a_max = 1.0;
  int a_steps = 20;
  std::string spacing = "linear";
  QuadratureSpec quad;
  std::uint64_t mc_samples = 0;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out = "-";
  unsigned jobs = 1;

  app.add_option("--preset", preset, "symmetric | strekalov")
      ->check(CLI::IsMember({"symmetric", "strekalov"}));
  auto* o_sp = app.add_option("--sigma-plus", sigma_plus, "Width of k1 + k2 [1/mm]");
  auto* o_sm = app.add_option("--sigma-minus", sigma_minus, "Width of k1 - k2 [1/mm]");
  auto* o_scheme = app.add_option("--scheme", scheme, "central | inclusive | conditioned")
                       ->check(CLI::IsMember({"central", "inclusive", "conditioned"}));
  auto* o_kappa = app.add_option("--kappa", kappa, "Left detector momentum for conditioned [1/mm]");
  auto* o_amin = app.add_option("--a-min", a_min, "Smallest slit half-width [mm]");
  auto* o_amax = app.add_option("--a-max", a_max, "Largest slit half-width [mm]");
  auto* o_steps = app.add_option("--a-steps", a_steps, "Number of half-widths (>= 2)");
  app.add_option("--spacing", spacing, "linear | log")->check(CLI::IsMember({"linear", "log"}));
  app.add_option("--rel-tol", quad.rel_tol, "Quadrature relative tolerance");
  app.add_option("--tail-cutoff", quad.tail_cutoff_multiplier,
                 "Gaussian widths kept by real-line integrals (>= 6)");
  auto* o_mc = app.add_option("--mc-samples", mc_samples, "Monte Carlo proposals per row");
  auto* o_seed = app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out, "Output path, - for stdout");
  app.add_option("--jobs", jobs, "Rows computed in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("arguments", e.what());
  }

  SweepConfig cfg;
  cfg.preset = preset;
  if (!preset.empty()) {
    const Preset* p = find_preset(preset);
    cfg.scheme = DetectionScheme::central();
    auto take = [&](CLI::Option* opt, auto& target, auto explicit_value, auto preset_value,
                    const char* key) {
      if (opt->count() > 0) {
        if (explicit_value != preset_value) {
          std::ostringstream note;
          note << key << " = " << explicit_value << " overrides preset " << preset << " value "
               << preset_value;
          cfg.notes.push_back(note.str());
        }
        target = explicit_value;
      } else {
        target = preset_value;
      }
    };
    take(o_sp, cfg.sigma_plus, sigma_plus, p->sigma_plus, "sigma-plus");
    take(o_sm, cfg.sigma_minus, sigma_minus, p->sigma_minus, "sigma-minus");
    take(o_amin, cfg.a_min, a_min, p->a_min, "a-min");
    take(o_amax, cfg.a_max, a_max, p->a_max, "a-max");
    take(o_steps, cfg.a_steps, a_steps, p->a_steps, "a-steps");
  } else {
    if (o_sp->count() == 0) throw ConfigError("sigma-plus", "required unless --preset is given");
    if (o_sm->count() == 0) throw ConfigError("sigma-minus", "required unless --preset is given");
    cfg.sigma_plus = sigma_plus;
    cfg.sigma_minus = sigma_minus;
    cfg.a_min = a_min;
    cfg.a_max = a_max;
    cfg.a_steps = a_steps;
  }

  if (scheme == "conditioned") {
    if (o_kappa->count() == 0) throw ConfigError("kappa", "required with --scheme conditioned");
    cfg.scheme = DetectionScheme::conditioned(kappa);
  } else {
    if (o_kappa->count() > 0) throw ConfigError("kappa", "only valid with --scheme conditioned");
    cfg.scheme = scheme == "inclusive" ? DetectionScheme::inclusive() : DetectionScheme::central();
  }
  if (!preset.empty() && o_scheme->count() > 0 && scheme != "central") {
    cfg.notes.push_back("scheme = " + scheme + " overrides preset " + preset + " value central");
  }

  cfg.spacing = spacing == "log" ? Spacing::Log : Spacing::Linear;
  cfg.quadrature = quad;
  if (o_mc->count() > 0) {
    cfg.mc = OracleConfig{mc_samples, seed, 1};
  } else if (o_seed->count() > 0) {
    throw ConfigError("seed", "only meaningful together with --mc-samples");
  }
  cfg.output_format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  cfg.output_path = out;
  cfg.jobs = jobs;
  cfg.validate();
  return cfg;
}

SweepConfig parse_config(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const GaussianPairState state(config.sigma_plus, config.sigma_minus);
  const auto widths = config.half_widths();
  std::vector<SweepRow> rows(widths.size());
  std::vector<std::exception_ptr> errors(widths.size());

  auto compute = [&](std::size_t i) {
    const SlitConfig slit(widths[i]);
    SweepRow row;
    row.a = widths[i];
    row.scheme = config.scheme.label();
    const auto s = spread(state, slit, config.scheme, config.quadrature);
    row.delta_k2_numeric = s.delta_k2;
    row.mean_k2 = s.mean_k2;
    row.numeric_error = s.numeric_error;
    row.physical_slit_estimate = physical_slit_estimate(slit);
    switch (config.scheme.kind) {
    case DetectionScheme::Kind::Central:
      if (cd_small_a_valid(state, slit)) row.delta_k2_formula = cd_small_a_formula(state, slit);
      break;
    case DetectionScheme::Kind::Inclusive:
      row.delta_k2_formula = id_formula(state);
      break;
    case DetectionScheme::Kind::Conditioned:
      break;
    }
    if (config.mc) {
      const auto stats = config.scheme.kind == DetectionScheme::Kind::Central
                             ? sample_central(state, slit, *config.mc, config.quadrature)
                             : sample_inclusive(state, slit, *config.mc);
      row.mc_std = stats.std;
      row.mc_std_error = stats.std_error_of_std;
    }
    rows[i] = std::move(row);
  };

  auto worker = [&](unsigned w, unsigned stride) {
    for (std::size_t i = w; i < widths.size(); i += stride) {
      try {
        compute(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned jobs = std::min<unsigned>(config.jobs, static_cast<unsigned>(widths.size()));
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(worker, w, jobs);
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!errors[i]) continue;
    std::string what;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    }
    throw SweepError("numerical failure at a = " + format_double(widths[i]) + ", scheme " +
                     config.scheme.label() + ": " + what);
  }
  return rows;
}

std::string render_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "a,scheme,delta_k2_numeric,delta_k2_formula,mean_k2,numeric_error,mc_std,mc_std_error,"
      "physical_slit_estimate\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    out += format_double(r.a) + ',' + r.scheme + ',' + format_double(r.delta_k2_numeric) + ',' +
           opt(r.delta_k2_formula) + ',' + format_double(r.mean_k2) + ',' +
           format_double(r.numeric_error) + ',' + opt(r.mc_std) + ',' + opt(r.mc_std_error) + ',' +
           format_double(r.physical_slit_estimate) + '\n';
  }
  return out;
}

std::string render_json(const std::vector<SweepRow>& rows, const SweepConfig& config) {
  nlohmann::ordered_json meta;
  meta["tool"] = "popper_sweep";
  meta["version"] = version();
  meta["seed"] = config.mc ? nlohmann::ordered_json(config.mc->seed) : nlohmann::ordered_json(nullptr);

  nlohmann::ordered_json c;
  c["preset"] = config.preset.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(config.preset);
  c["sigma_plus"] = config.sigma_plus;
  c["sigma_minus"] = config.sigma_minus;
  c["scheme"] = config.scheme.label();
  c["kappa"] = config.scheme.kind == DetectionScheme::Kind::Conditioned
                   ? nlohmann::ordered_json(config.scheme.kappa)
                   : nlohmann::ordered_json(nullptr);
  c["a_min"] = config.a_min;
  c["a_max"] = config.a_max;
  c["a_steps"] = config.a_steps;
  c["spacing"] = spacing_name(config.spacing);
  c["quadrature"] = {{"rel_tol", config.quadrature.rel_tol},
                     {"abs_tol", config.quadrature.abs_tol},
                     {"max_subdivisions", config.quadrature.max_subdivisions},
                     {"tail_cutoff_multiplier", config.quadrature.tail_cutoff_multiplier}};
  if (config.mc) {
    c["mc"] = {{"n_samples", config.mc->n_samples}, {"seed", config.mc->seed}};
  } else {
    c["mc"] = nullptr;
  }
  c["output_format"] = format_name(config.output_format);
  meta["config"] = c;
  meta["notes"] = config.notes;

  nlohmann::ordered_json doc;
  doc["metadata"] = meta;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["a"] = r.a;
    j["scheme"] = r.scheme;
    j["delta_k2_numeric"] = r.delta_k2_numeric;
    j["delta_k2_formula"] = optional_json(r.delta_k2_formula);
    j["mean_k2"] = r.mean_k2;
    j["numeric_error"] = r.numeric_error;
    j["mc_std"] = optional_json(r.mc_std);
    j["mc_std_error"] = optional_json(r.mc_std_error);
    j["physical_slit_estimate"] = r.physical_slit_estimate;
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void emit(const std::vector<SweepRow>& rows, const SweepConfig& config) {
  if (rows.empty()) throw std::invalid_argument("emit: no rows");
  const std::string text = config.output_format == OutputFormat::Csv ? render_csv(rows)
                                                                      : render_json(rows, config);
  if (config.output_path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + config.output_path + " for writing");
  file << text;
  file.flush();
  if (!file) throw std::runtime_error("write failed for " + config.output_path);
}

} // namespace popperlab
