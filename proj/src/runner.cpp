#include "stackcap/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stackcap/analysis.hpp"
#include "stackcap/circuit.hpp"
#include "stackcap/core.hpp"
#include "stackcap/errors.hpp"
#include "stackcap/io.hpp"
#include "stackcap/mae.hpp"
#include "stackcap/pnp.hpp"
#include "stackcap/timescale.hpp"

namespace stackcap::cli {

namespace {

namespace fs_detail {
std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}
}  // namespace fs_detail

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  v.back() = b;
  return v;
}

std::vector<std::string> csv_metadata(const ExperimentConfig& cfg, const std::string& extra = "") {
  std::vector<std::string> meta;
  meta.push_back(std::string("stackcap ") + kVersion);
  meta.push_back("config " + config_hash(cfg));
  meta.push_back("model " + model_name(cfg.model));
  meta.push_back("times in tau_c");
  if (!extra.empty()) meta.push_back(extra);
  return meta;
}

StackGeometry make_geometry(const ExperimentConfig& cfg) { return {cfg.n, cfg.L}; }
DriveSpec make_drive(const ExperimentConfig& cfg) { return {cfg.V_plus, cfg.V_minus}; }
ElectrolyteSpec make_electrolyte(const ExperimentConfig& cfg) {
  return {cfg.z_plus, cfg.z_minus};
}

pnp::GridSpec make_grid_spec(const ExperimentConfig& cfg) {
  pnp::GridSpec gs;
  gs.kind = (cfg.grid == "uniform") ? pnp::GridSpec::Kind::Uniform : pnp::GridSpec::Kind::Refined;
  gs.uniform_cells = cfg.uniform_cells;
  gs.layer_dx = cfg.layer_dx;
  gs.growth = cfg.growth;
  gs.bulk_dx = cfg.bulk_dx;
  return gs;
}

void emit(RunManifest& man, const std::string& out_dir, const std::string& name,
          const io::CsvTable& table) {
  io::write_csv_atomic(fs_detail::join_path(out_dir, name), table);
  man.outputs.push_back(name);
}

void emit_json(RunManifest& man, const std::string& out_dir, const std::string& name,
               const nlohmann::json& j) {
  io::write_text_atomic(fs_detail::join_path(out_dir, name), j.dump(2) + "\n");
  man.outputs.push_back(name);
}

// ---------------------------------------------------------------- circuit --

void run_circuit(const ExperimentConfig& cfg, const std::string& out_dir, RunManifest& man) {
  const StackGeometry g = make_geometry(cfg);
  const DriveSpec d = make_drive(cfg);
  const ElectrolyteSpec e = make_electrolyte(cfg);
  const auto sys = circuit::assemble(g, d, e);

  circuit::IntegrateControl ctrl;
  ctrl.rtol = cfg.rtol;
  ctrl.atol = cfg.atol;
  const auto traj =
      circuit::integrate(sys, cfg.t_final, ctrl, linspace(0.0, cfg.t_final, cfg.samples));

  io::CsvTable t;
  t.metadata = csv_metadata(cfg);
  t.header.push_back("time");
  for (std::size_t k = 0; k < sys.size(); ++k) t.header.push_back("zeta_" + std::to_string(k));
  for (std::size_t k = 0; k + 1 < sys.size(); ++k) t.header.push_back("j_" + std::to_string(k));
  t.header.push_back("conserved_charge");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row;
    row.reserve(2 * sys.size() + 1);
    row.push_back(traj.times[i]);
    row.insert(row.end(), traj.states[i].begin(), traj.states[i].end());
    row.insert(row.end(), traj.currents[i].begin(), traj.currents[i].end());
    row.push_back(circuit::conserved_charge(traj.states[i], sys));
    t.rows.push_back(std::move(row));
  }
  emit(man, out_dir, cfg.effective_prefix() + "_trajectory.csv", t);

  const auto zinf = circuit::equilibrium(sys);
  const auto spec = timescale::spectrum(sys, zinf);
  nlohmann::json j;
  j["equilibrium_zeta"] = zinf;
  j["lambda_c"] = spec.lambda_c;
  j["tau_n"] = spec.tau_n;
  j["eigenvalues"] = spec.eigenvalues;
  emit_json(man, out_dir, cfg.effective_prefix() + "_summary.json", j);
}

// -------------------------------------------------------------------- pnp --

io::CsvTable charges_table(const ExperimentConfig& cfg, const pnp::PnpResult& res) {
  io::CsvTable t;
  t.metadata = csv_metadata(cfg);
  t.header.push_back("time");
  const std::size_t n_stacks = res.diagnostics.stack_charge.front().size();
  for (std::size_t k = 0; k < n_stacks; ++k) t.header.push_back("q_" + std::to_string(k));
  t.header.push_back("center_salt");
  t.header.push_back("mass_plus");
  t.header.push_back("mass_minus");
  for (std::size_t i = 0; i < res.diagnostics.times.size(); ++i) {
    std::vector<double> row;
    row.reserve(n_stacks + 4);
    row.push_back(res.diagnostics.times[i]);
    row.insert(row.end(), res.diagnostics.stack_charge[i].begin(),
               res.diagnostics.stack_charge[i].end());
    row.push_back(res.diagnostics.center_salt[i]);
    row.push_back(res.diagnostics.mass_plus[i]);
    row.push_back(res.diagnostics.mass_minus[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit_snapshots(const ExperimentConfig& cfg, const pnp::PnpResult& res,
                    const std::string& out_dir, RunManifest& man) {
  for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
    const auto& snap = res.snapshots[s];
    io::CsvTable t;
    t.metadata = csv_metadata(cfg, "snapshot time " + io::format_double(snap.time));
    t.header = {"x", "c_plus", "c_minus", "phi"};
    for (std::size_t j = 0; j < res.grid.size(); ++j)
      t.rows.push_back({res.grid.x[j], snap.c_plus[j], snap.c_minus[j], snap.phi[j]});
    emit(man, out_dir, cfg.effective_prefix() + "_snapshot_" + std::to_string(s) + ".csv", t);
  }
}

void run_pnp(const ExperimentConfig& cfg, const std::string& out_dir, RunManifest& man) {
  pnp::RunOptions ro;
  ro.dt = cfg.dt;
  ro.t_final = cfg.t_final;
  ro.output_times = cfg.output_times;
  const auto res = pnp::run(make_geometry(cfg), make_drive(cfg), make_electrolyte(cfg),
                            cfg.epsilon, ro, make_grid_spec(cfg));
  emit(man, out_dir, cfg.effective_prefix() + "_charges.csv", charges_table(cfg, res));
  emit_snapshots(cfg, res, out_dir, man);
}

// ------------------------------------------------------------ mae-compare --

void run_mae_compare(const ExperimentConfig& cfg, const std::string& out_dir, RunManifest& man) {
  const StackGeometry g = make_geometry(cfg);
  const DriveSpec d = make_drive(cfg);
  const ElectrolyteSpec e = make_electrolyte(cfg);

  const std::vector<double> times = linspace(0.0, cfg.t_final, cfg.samples);
  pnp::RunOptions ro;
  ro.dt = cfg.dt;
  ro.t_final = cfg.t_final;
  ro.output_times = times;
  const auto res = pnp::run(g, d, e, cfg.epsilon, ro, make_grid_spec(cfg));
  if (res.snapshots.size() != times.size())
    throw NumericError("snapshot count does not match the comparison schedule");

  const auto sys = circuit::assemble(g, d, e);
  circuit::IntegrateControl ctrl;
  ctrl.rtol = cfg.rtol;
  ctrl.atol = cfg.atol;
  const auto traj = circuit::integrate(sys, cfg.t_final, ctrl, times);

  io::CsvTable t;
  t.metadata = csv_metadata(cfg, "epsilon " + io::format_double(cfg.epsilon));
  t.header = {"time",       "rel_err_phi",    "rel_err_cplus",  "rel_err_cminus",
              "l2_err_phi", "l2_err_cplus",   "l2_err_cminus"};
  bool warned = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto comp = mae::composite_field(traj.states[i], sys, res.grid);
    comp.field.time = times[i];
    if (!warned && !comp.warnings.empty()) {
      man.notes.insert(man.notes.end(), comp.warnings.begin(), comp.warnings.end());
      warned = true;
    }
    const auto rep = mae::compare(comp, res.grid, res.snapshots[i], res.grid);
    t.rows.push_back({times[i], rep.rel_err_phi, rep.rel_err_cplus, rep.rel_err_cminus,
                      rep.rel_err_phi_l2, rep.rel_err_cplus_l2, rep.rel_err_cminus_l2});
  }
  emit(man, out_dir, cfg.effective_prefix() + "_mae_error.csv", t);
}

// -------------------------------------------------------- timescale sweep --

void run_sweep(const ExperimentConfig& cfg, const std::string& out_dir, RunManifest& man) {
  const auto table = timescale::sweep_tau_vs_n(make_electrolyte(cfg), make_drive(cfg),
                                               cfg.H_values, cfg.n_min, cfg.n_max, cfg.threads);
  io::CsvTable t;
  t.metadata = csv_metadata(cfg);
  t.header = {"H", "n", "ratio", "tau_n"};
  for (const auto& row : table.rows)
    t.rows.push_back({row.H, static_cast<double>(row.n), row.ratio, row.tau_n});
  emit(man, out_dir, cfg.effective_prefix() + "_sweep.csv", t);

  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : table.fits) {
    nlohmann::json jf;
    jf["H"] = f.H;
    jf["A"] = f.A;
    jf["B"] = f.B;
    jf["r_squared"] = f.r_squared;
    fits.push_back(jf);
  }
  emit_json(man, out_dir, cfg.effective_prefix() + "_fits.json", fits);
}

// ------------------------------------------------------------- relaxation --

void run_relaxation(const ExperimentConfig& cfg, const std::string& out_dir, RunManifest& man) {
  pnp::RunOptions ro;
  ro.dt = cfg.dt;
  ro.t_final = cfg.t_final;
  const auto res = pnp::run(make_geometry(cfg), make_drive(cfg), make_electrolyte(cfg),
                            cfg.epsilon, ro, make_grid_spec(cfg));
  const auto& diag = res.diagnostics;
  const std::size_t wall = diag.stack_charge.front().size() - 1;  // right outer wall
  const auto r = pnp::charge_relaxation(diag, wall);

  io::CsvTable t;
  t.metadata = csv_metadata(cfg, "relaxation of stack " + std::to_string(wall));
  t.header = {"time", "relaxation", "center_salt"};
  for (std::size_t i = 0; i < diag.times.size(); ++i)
    t.rows.push_back({diag.times[i], r[i], diag.center_salt[i]});
  emit(man, out_dir, cfg.effective_prefix() + "_relaxation.csv", t);

  // Fit on the clean part of the record: r in (floor, 1].
  std::vector<double> tt, rr;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 1e-6) || r[i] > 1.0 + 1e-12) break;
    tt.push_back(diag.times[i]);
    rr.push_back(r[i]);
  }
  const auto fit = analysis::biexponential_fit(tt, rr);
  const auto dep = analysis::salt_depletion(diag.center_salt);

  nlohmann::json j = nlohmann::json::parse(analysis::to_json(fit));
  j["salt_min"] = dep.min_value;
  j["salt_depletion_fraction"] = dep.depletion_fraction;
  j["tau_bar"] = analysis::diffusion_timescale(Scales::from_epsilon(cfg.epsilon)).tau_bar;
  emit_json(man, out_dir, cfg.effective_prefix() + "_fit.json", j);
}

// -------------------------------------------------------------- dispatch --

void finalize(RunManifest& man, const std::string& out_dir, const std::string& prefix,
              std::chrono::steady_clock::time_point t0) {
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_text_atomic(fs_detail::join_path(out_dir, prefix + "_manifest.json"),
                        man.to_json() + "\n");
}

template <typename Body>
RunManifest guarded_run(const ExperimentConfig& cfg, const std::string& out_dir, Body body) {
  RunManifest man;
  man.model = model_name(cfg.model);
  man.config_text = serialize(cfg);
  man.config_hash = config_hash(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(man);
    man.converged = true;
  } catch (const StabilityError& ex) {
    man.status = "numeric-failure";
    man.error_code = "stability";
    man.error = ex.what();
  } catch (const FitError& ex) {
    man.status = "numeric-failure";
    man.error_code = "fit";
    man.error = ex.what();
  } catch (const NumericError& ex) {
    man.status = "numeric-failure";
    man.error_code = "numeric";
    man.error = ex.what();
  } catch (const ParameterError& ex) {
    man.status = "config-error";
    man.error_code = "parameter";
    man.error = ex.what();
  } catch (const RangeError& ex) {
    man.status = "config-error";
    man.error_code = "range";
    man.error = ex.what();
  } catch (const std::exception& ex) {
    man.status = "numeric-failure";
    man.error_code = "internal";
    man.error = ex.what();
  }
  finalize(man, out_dir, cfg.effective_prefix(), t0);
  return man;
}

}  // namespace

int RunManifest::exit_code() const {
  if (status == "ok") return 0;
  return status == "config-error" ? 2 : 3;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["status"] = status;
  j["error_code"] = error_code;
  j["error"] = error;
  j["model"] = model;
  j["config_hash"] = config_hash;
  j["config"] = config_text;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["converged"] = converged;
  j["outputs"] = outputs;
  j["notes"] = notes;
  return j.dump(2);
}

RunManifest run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  return guarded_run(cfg, out_dir, [&](RunManifest& man) {
    switch (cfg.model) {
      case Model::Circuit:
        run_circuit(cfg, out_dir, man);
        break;
      case Model::Pnp:
        run_pnp(cfg, out_dir, man);
        break;
      case Model::MaeCompare:
        run_mae_compare(cfg, out_dir, man);
        break;
      case Model::TimescaleSweep:
        run_sweep(cfg, out_dir, man);
        break;
      case Model::Relaxation:
        run_relaxation(cfg, out_dir, man);
        break;
    }
  });
}

RunManifest run_timescale_report(const ExperimentConfig& cfg, const std::string& out_dir) {
  return guarded_run(cfg, out_dir, [&](RunManifest& man) {
    const auto sys =
        circuit::assemble(make_geometry(cfg), make_drive(cfg), make_electrolyte(cfg));
    const auto zinf = circuit::equilibrium(sys);
    const auto spec = timescale::spectrum(sys, zinf);
    nlohmann::json j;
    j["tau_n"] = spec.tau_n;
    j["lambda_c"] = spec.lambda_c;
    j["zero_threshold"] = spec.zero_threshold;
    j["eigenvalues"] = spec.eigenvalues;
    j["equilibrium_zeta"] = zinf;
    emit_json(man, out_dir, cfg.effective_prefix() + "_timescale.json", j);
  });
}

ExperimentConfig figure_config(const std::string& figure, const std::string& scale) {
  if (scale != "desk" && scale != "paper")
    throw ConfigError({"unknown scale '" + scale + "' (expected desk or paper)"});
  const bool desk = scale == "desk";

  ExperimentConfig cfg;
  cfg.z_plus = 1;
  cfg.z_minus = -1;
  cfg.prefix = figure;
  if (figure == "fig2") {
    cfg.model = Model::MaeCompare;
    cfg.n = 5;
    cfg.L = 0.5;
    cfg.H = 0.5;
    cfg.V_plus = 0.2;
    cfg.V_minus = -0.2;
    cfg.epsilon = desk ? 0.02 : 0.005;
    cfg.dt = desk ? 0.01 : 0.005;
    cfg.t_final = 10.0;
    cfg.samples = 101;
  } else if (figure == "fig3") {
    cfg.model = Model::Pnp;
    cfg.n = 5;
    cfg.L = 0.5;
    cfg.H = 0.5;
    cfg.V_plus = 0.2;
    cfg.V_minus = -0.2;
    cfg.epsilon = desk ? 0.02 : 0.005;
    cfg.dt = desk ? 0.01 : 0.005;
    cfg.t_final = 30.0;
    cfg.output_times = {0.5, 1.0, 2.0, 5.0, 10.0, 30.0};
  } else if (figure == "fig4") {
    cfg.model = Model::Circuit;
    cfg.n = 5;
    cfg.L = 0.5;
    cfg.H = 0.5;
    cfg.V_plus = 0.2;
    cfg.V_minus = -0.2;
    cfg.t_final = 60.0;
    cfg.samples = 601;
  } else if (figure == "fig5") {
    cfg.model = Model::TimescaleSweep;
    cfg.V_plus = 0.2;
    cfg.V_minus = -0.2;
    cfg.n = 2;
    cfg.L = 0.5;
    cfg.H = 0.5;
    cfg.n_min = 2;
    cfg.n_max = 50;
    cfg.H_values = {0.25, 0.5, 0.75};
  } else if (figure == "fig6") {
    cfg.model = Model::Relaxation;
    cfg.n = 1;
    cfg.L = 1.0;
    cfg.H = 0.0;
    cfg.epsilon = 0.01;
    cfg.V_plus = 2.0;
    cfg.V_minus = -2.0;
    cfg.dt = desk ? 0.05 : 0.02;
    cfg.t_final = desk ? 150.0 : 300.0;
  } else {
    throw ConfigError({"unknown figure '" + figure + "' (expected fig2..fig6)"});
  }
  return cfg;
}

RunManifest reproduce(const std::string& figure, const std::string& scale,
                      const std::string& out_dir, int threads) {
  ExperimentConfig base = figure_config(figure, scale);
  base.threads = std::max(1, threads);
  const bool desk = scale == "desk";

  std::vector<ExperimentConfig> runs;
  if (figure == "fig6") {
    const std::pair<double, const char*> drives[] = {{0.1, "0p1"}, {1.0, "1"}, {2.0, "2"}};
    for (const auto& [v, tag] : drives) {
      ExperimentConfig c = base;
      c.V_plus = v;
      c.V_minus = -v;
      c.prefix = std::string("fig6_v") + tag;
      runs.push_back(c);
    }
  } else {
    runs.push_back(base);
  }

  RunManifest combined;
  combined.model = model_name(base.model);
  combined.config_text = serialize(base);
  combined.config_hash = config_hash(base);
  combined.converged = true;
  const auto t0 = std::chrono::steady_clock::now();
  if (desk && (figure == "fig2" || figure == "fig3"))
    combined.notes.push_back("desk scale: epsilon 0.005 -> 0.02 and coarser dt");
  if (desk && figure == "fig6")
    combined.notes.push_back("desk scale: dt 0.02 -> 0.05, t_final 300 -> 150");

  for (const auto& c : runs) {
    const RunManifest sub = run_experiment(c, out_dir);
    combined.outputs.insert(combined.outputs.end(), sub.outputs.begin(), sub.outputs.end());
    if (c.effective_prefix() != figure)
      combined.outputs.push_back(c.effective_prefix() + "_manifest.json");
    combined.notes.insert(combined.notes.end(), sub.notes.begin(), sub.notes.end());
    if (sub.status != "ok") {
      combined.status = sub.status;
      combined.error_code = sub.error_code;
      combined.error = sub.error;
      combined.converged = false;
    }
  }
  combined.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_text_atomic(fs_detail::join_path(out_dir, figure + "_manifest.json"),
                        combined.to_json() + "\n");
  return combined;
}

}  // namespace stackcap::cli
