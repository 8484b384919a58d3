#ifndef PARAKERN_RUN_CONFIG_HPP
#define PARAKERN_RUN_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "parakern/validation.hpp"

// Declarative run configuration: a single INI-style keyed text file that
// pins every numeric knob of a run.  Parsing is strict -- unknown keys or
// out-of-range values are errors, so a config that loads is a config that
// runs.

namespace parakern {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct OutputSettings {
  std::string format = "csv";  // "csv" or "json"
  std::string path;            // empty = stdout
  int precision = 17;          // significant digits
};

struct SolveSettings {
  std::string problem = "cauchy";    // "cauchy" or "nonhomogeneous"
  std::string initial = "gaussian";  // gaussian: exp(-x^2); one; linear
  std::string source = "one";        // nonhomogeneous g: "one" or "zero"
  double W0 = 1.0;                   // growth envelope of the initial data
  double W = 0.0;
};

struct RunConfig {
  std::string drift_coefficient = "constant";  // zero|constant|bounded-oscillatory
  double drift_gamma = 0.5;
  double drift_K = 0.5;
  double drift_K_minus = 0.0;

  NeumannConfig neumann;
  GridSpec grids;
  BoundsSettings bounds;
  std::string bounds_grid_hash;  // grid fingerprint C6 was calibrated on

  FDConfig fd;
  MCConfig mc;

  OutputSettings output;
  SolveSettings solve;

  /// Materializes the drift selector; throws ConfigError on an unknown name.
  DriftSpec make_drift() const;
  /// Range-checks every field against the module preconditions.
  void validate() const;
  /// Fingerprint of the grid axes (used to tie C6 to its calibration grid).
  std::string grid_hash() const;
};

/// Parses the INI text.  Unknown sections/keys, duplicate keys, malformed
/// numbers, and range violations all throw ConfigError with a line number.
RunConfig parse_run_config(const std::string& text);

/// Reads and parses a file; throws ConfigError if unreadable.
RunConfig load_run_config(const std::string& path);

/// Normalized form: parse(serialize(c)) == c field-for-field.
std::string serialize_run_config(const RunConfig& config);

}  // namespace parakern

#endif
