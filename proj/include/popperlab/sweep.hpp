#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "popperlab/conditioning.hpp"
#include "popperlab/oracle.hpp"
#include "popperlab/quadrature.hpp"

namespace popperlab {

const char* version();

enum class Spacing { Linear, Log };
enum class OutputFormat { Csv, Json };

// Usage or configuration problem; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

// --help was requested; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure while computing a sweep row.
class SweepError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  std::string preset; // empty when none was given
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
  DetectionScheme scheme = DetectionScheme::central();
  double a_min = 0.05;
  double a_max = 1.0;
  int a_steps = 20;
  Spacing spacing = Spacing::Linear;
  QuadratureSpec quadrature;
  std::optional<OracleConfig> mc;
  OutputFormat output_format = OutputFormat::Csv;
  std::string output_path = "-"; // "-" is stdout
  unsigned jobs = 1;
  // Precedence decisions taken while resolving the config (explicit values
  // overriding a preset).
  std::vector<std::string> notes;

  // Throws ConfigError.
  void validate() const;
  // Slit half-widths of the scan, ascending, endpoints exact.
  std::vector<double> half_widths() const;
};

// Parses command-line flags (argv[0] is the program name). A --config file
// holds the same keys as the long flags, one `key = value` per line; flags
// override the file, and both override the preset.
SweepConfig parse_config(int argc, const char* const* argv);
SweepConfig parse_config(const std::vector<std::string>& args);

struct SweepRow {
  double a = 0.0;
  std::string scheme;
  double delta_k2_numeric = 0.0;
  std::optional<double> delta_k2_formula;
  double mean_k2 = 0.0;
  double numeric_error = 0.0;
  std::optional<double> mc_std;
  std::optional<double> mc_std_error;
  double physical_slit_estimate = 0.0;
};

// One row per half-width, ordered by a ascending. Throws SweepError naming
// the first failing (a, scheme).
std::vector<SweepRow> run_sweep(const SweepConfig& config);

std::string render_csv(const std::vector<SweepRow>& rows);
std::string render_json(const std::vector<SweepRow>& rows, const SweepConfig& config);

// Writes rows in config.output_format to config.output_path.
void emit(const std::vector<SweepRow>& rows, const SweepConfig& config);

} // namespace popperlab
