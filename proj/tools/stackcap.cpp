// Batch experiment runner: parses a config, dispatches to the selected
// solver, and writes CSV/JSON artifacts plus a run manifest.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stackcap/config.hpp"
#include "stackcap/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw stackcap::cli::ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void report(const stackcap::cli::RunManifest& man) {
  if (man.status == "ok") {
    std::printf("ok (%.2f s)\n", man.wall_seconds);
    for (const auto& f : man.outputs) std::printf("  wrote %s\n", f.c_str());
    for (const auto& n : man.notes) std::printf("  note: %s\n", n.c_str());
  } else {
    std::fprintf(stderr, "%s [%s]: %s\n", man.status.c_str(), man.error_code.c_str(),
                 man.error.c_str());
  }
}

int run_with_config(const std::string& subcommand, const std::string& config_path,
                    const std::string& out_dir, int threads) {
  using namespace stackcap::cli;
  ExperimentConfig cfg;
  try {
    cfg = parse_config(read_file(config_path));
    const std::string model = model_name(cfg.model);
    if (subcommand == "sweep" && cfg.model != Model::TimescaleSweep)
      throw ConfigError({"subcommand 'sweep' needs model = timescale-sweep, got " + model});
    if (subcommand == "compare" && cfg.model != Model::MaeCompare)
      throw ConfigError({"subcommand 'compare' needs model = mae-compare, got " + model});
    if (subcommand == "simulate" && cfg.model != Model::Circuit && cfg.model != Model::Pnp &&
        cfg.model != Model::Relaxation)
      throw ConfigError(
          {"subcommand 'simulate' needs model = circuit, pnp, or relaxation, got " + model});
  } catch (const ConfigError& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 2;
  }
  if (threads > 0) cfg.threads = threads;
  const RunManifest man = (subcommand == "timescale") ? run_timescale_report(cfg, out_dir)
                                                      : run_experiment(cfg, out_dir);
  report(man);
  return man.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stack-electrode supercapacitor charging simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", scale = "desk", figure;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--threads", threads, "worker threads for sweep-type runs");
  };

  auto* simulate =
      app.add_subcommand("simulate", "run the configured model (circuit, pnp, or relaxation)");
  add_common(simulate, true);

  auto* timescale =
      app.add_subcommand("timescale", "compute the charging timescale for one geometry");
  add_common(timescale, true);

  auto* sweep = app.add_subcommand("sweep", "charging timescale across n and H");
  add_common(sweep, true);

  auto* compare = app.add_subcommand("compare", "asymptotic reconstruction vs full solve");
  add_common(compare, true);

  auto* repro = app.add_subcommand("reproduce", "rebuild a published-figure data set");
  repro->add_option("--figure", figure, "fig2 | fig3 | fig4 | fig5 | fig6")->required();
  repro->add_option("--scale", scale, "desk (default) or paper");
  add_common(repro, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (repro->parsed()) {
      const auto man = stackcap::cli::reproduce(figure, scale, out_dir, threads);
      report(man);
      return man.exit_code();
    }
    std::string sub = "simulate";
    if (timescale->parsed()) sub = "timescale";
    if (sweep->parsed()) sub = "sweep";
    if (compare->parsed()) sub = "compare";
    (void)simulate;
    return run_with_config(sub, config_path, out_dir, threads);
  } catch (const stackcap::cli::ConfigError& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  }
}
