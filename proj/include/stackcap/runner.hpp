#pragma once

#include <string>
#include <vector>

#include "stackcap/config.hpp"

namespace stackcap::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Written for every run, success or failure; failures carry machine-
/// readable error codes instead of escaping as exceptions.
struct RunManifest {
  std::string status = "ok";  ///< ok | config-error | numeric-failure
  std::string error_code;     ///< parameter | range | numeric | stability | fit | internal
  std::string error;          ///< human-readable failure description
  std::string model;
  std::string config_hash;
  std::string config_text;  ///< canonical config echo
  std::string version = kVersion;
  double wall_seconds = 0.0;
  bool converged = false;
  std::vector<std::string> outputs;  ///< files written, relative to out_dir
  std::vector<std::string> notes;    ///< scale substitutions, solver warnings

  int exit_code() const;  ///< 0 success, 2 config error, 3 numeric failure
  std::string to_json() const;
};

/// Dispatches one validated config: runs the selected model, writes CSV/JSON
/// artifacts and `<prefix>_manifest.json` under out_dir. Does not throw;
/// failures are reported through the manifest.
RunManifest run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Computes the charging timescale and spectrum for the config's system
/// (no time integration) and writes `<prefix>_timescale.json`.
RunManifest run_timescale_report(const ExperimentConfig& cfg, const std::string& out_dir);

/// Runs the preset experiment behind one published-figure data set
/// (fig2..fig6). scale = "desk" substitutes cheaper parameters (recorded in
/// the manifest notes); scale = "paper" runs the original ones.
RunManifest reproduce(const std::string& figure, const std::string& scale,
                      const std::string& out_dir, int threads = 1);

/// The preset behind reproduce(); exposed for tests and for --dump-config.
ExperimentConfig figure_config(const std::string& figure, const std::string& scale);

}  // namespace stackcap::cli
