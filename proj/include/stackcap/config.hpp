#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stackcap/errors.hpp"

namespace stackcap::cli {

enum class Model { Circuit, Pnp, MaeCompare, TimescaleSweep, Relaxation };

std::string model_name(Model m);

/// One batch experiment, parsed from flat INI-style text (sections
/// [experiment], [electrolyte], [geometry], [drive], [numerics], [sweep],
/// [output]; `key = value` lines; `#`/`;` comments). Every field has a
/// documented default; unknown sections or keys are rejected.
struct ExperimentConfig {
  Model model = Model::Circuit;

  // [electrolyte]
  int z_plus = 1;
  int z_minus = -1;

  // [geometry]
  int n = 1;
  double L = 1.0;
  double H = 0.0;

  // [drive]
  double V_plus = 0.0;
  double V_minus = 0.0;

  // [numerics]
  double epsilon = 0.01;
  double dt = 0.01;
  double t_final = 10.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t samples = 201;
  std::string grid = "refined";  ///< refined | uniform
  std::size_t uniform_cells = 400;
  double layer_dx = 0.05;
  double growth = 1.12;
  double bulk_dx = 0.01;
  std::vector<double> output_times;

  // [sweep]
  int n_min = 2;
  int n_max = 50;
  std::vector<double> H_values = {0.5};
  int threads = 1;

  // [output]
  std::string prefix;  ///< empty = model name

  std::string effective_prefix() const { return prefix.empty() ? model_name(model) : prefix; }

  bool operator==(const ExperimentConfig&) const = default;
};

/// Carries every violation found in one parse (syntax errors with line
/// numbers, then semantic violations), not just the first.
class ConfigError : public ParameterError {
 public:
  explicit ConfigError(std::vector<std::string> issues_);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parses and validates; throws ConfigError listing all problems.
ExperimentConfig parse_config(const std::string& text);

/// Canonical text form: fixed section/key order, %.17g numerics. Parsing the
/// result reproduces the config exactly.
std::string serialize(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace stackcap::cli
