#pragma once

// Experiment configuration files (JSON). Paths inside a config resolve
// relative to the config file's directory. Unknown keys are errors.

#include "eapt/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace eapt {

struct Diagnostic {
  enum class Severity { Error, Note };
  Severity severity = Severity::Error;
  std::string field;
  std::string message;

  std::string str() const;
};

/// Thrown for unreadable or invalid configs; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ExperimentConfig {
  std::string target = "cnot";
  /// Resolved path of a custom unitary file; empty for built-in targets.
  std::filesystem::path unitary_file;
  int system_qubits = 2;
  /// "none", "table1" or "custom".
  std::string noise_preset = "none";
  NoiseModel noise;
  std::optional<std::int64_t> shots;
  std::vector<int> scaling_factors{1, 3, 5};
  std::uint64_t seed = 0;
  bool seed_given = false;
  int bootstrap_resamples = 100;
  std::filesystem::path output_dir = "eapt_results";
  int threads = 1;
  ExtrapolationMethod extrapolation = ExtrapolationMethod::Linear;
  bool save_datasets = false;
  /// Noise section as written, echoed into results.
  nlohmann::ordered_json noise_source = "none";
};

struct ParsedConfig {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

/// Full validation pass; collects every problem instead of stopping at the first.
ParsedConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ParsedConfig load_config(const std::filesystem::path& path);
/// load_config that throws ConfigError on any error diagnostic.
ExperimentConfig require_config(const std::filesystem::path& path);

/// First line d, then d rows of d "re,im" pairs.
Matrix read_unitary_file(const std::filesystem::path& path);

TargetProcess make_target(const ExperimentConfig& config);
EaptOptions make_options(const ExperimentConfig& config);

/// Canonical echo of the experiment definition. Execution-only settings
/// (threads, output location) are left out so results do not depend on them.
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

}  // namespace eapt
