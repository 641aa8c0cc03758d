#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bolab/amplitudes.hpp"
#include "bolab/radial_law.hpp"

namespace bolab {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"flow",     "sample",     "tailmass", "renorm",
                                                 "invariance", "weakconv", "gibbs"};
  return names;
}

/// Subcommands that draw random samples and therefore need a seed.
bool is_stochastic(std::string_view subcommand);

/// Validated experiment description. Every field carries its resolved value;
/// defaults are filled in per subcommand by build_config().
struct ExperimentConfig {
  std::string subcommand;

  std::string law = "gaussian";
  double law_scale = 1.0;
  bool normalize_law = false;

  std::string amps = "power";
  double amp_p = 1.0;
  double amp_q = 0.0;

  std::size_t n = 32;  ///< truncation N; the mode index for renorm
  double t = 1.0;
  double s = 0.0;
  double sigma = 1.0;
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;

  std::string out;
  std::string format = "csv";

  std::string state;
  std::vector<std::size_t> profile;
  std::vector<std::size_t> grid;
  std::size_t n_ref = 256;
  std::string functional = "F1";
  std::vector<std::string> functionals;
  std::string flow = "truncated";
  bool negative_control = false;
  std::string cutoff = "triangular";
  double cutoff_a = 2.0;
  double cutoff_ramp = 1.0;
  bool dump_trajectories = false;

  RadialLaw radial_law() const;
  AmplitudeSequence amplitude_sequence() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// One entry of the configuration schema. The same table drives config-file
/// parsing, serialization, CLI flag registration and --help text.
struct ConfigKey {
  std::string name;
  std::string flag;                      ///< CLI long flag, e.g. "--alpha-p"
  std::vector<std::string> flag_aliases;
  std::string value_type;                ///< "int", "real", "bool", "text", "list<int>", ...
  std::string help;
  std::vector<std::string> applies_to;   ///< empty: every subcommand
  /// Default rendered as config text, per subcommand ("*" for all). No entry: no default.
  std::vector<std::pair<std::string, std::string>> defaults;
  std::function<std::optional<std::string>(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  /// Execution-only keys (workers, out) are left out of report echoes.
  bool echo = true;

  bool applies(std::string_view subcommand) const;
  std::optional<std::string> default_for(std::string_view subcommand) const;
};

const std::vector<ConfigKey>& config_schema();
const ConfigKey* find_config_key(std::string_view name);

/// A raw `key = value` entry and the line it came from (0 for CLI overrides).
struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Splits configuration text into entries. Blank lines and '#' comments are skipped.
/// Malformed lines are reported through `violations`.
std::vector<ConfigEntry> parse_entries(std::string_view text, std::vector<std::string>& violations);

/// Validates entries for `subcommand`, fills defaults, and checks cross-field
/// invariants. Throws ConfigError listing every violation.
ExperimentConfig build_config(std::string_view subcommand, const std::vector<ConfigEntry>& entries);

/// Parses a whole config file; the subcommand comes from its `subcommand` key.
ExperimentConfig parse_config(std::string_view text);

/// Inverse of parse_config: `subcommand = ...` followed by every applicable key.
std::string serialize_config(const ExperimentConfig& config);

/// (key, rendered value) for every applicable key with echo = true.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& config);

}  // namespace bolab
