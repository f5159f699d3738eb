// Command-line front end: single trajectories, ensembles and kappa sweeps,
// feasibility reports, and Q-function grids. Exit codes: 0 success, 2 bad
// configuration or usage, 3 invalidated trajectory / no valid trajectories.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "numstab/cavity_qed.hpp"
#include "numstab/ensemble.hpp"
#include "numstab/io.hpp"
#include "numstab/qfunc.hpp"
#include "numstab/scenario.hpp"
#include "numstab/sme.hpp"

namespace {

using namespace numstab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvalidRun = 3;

// Resolves an output file against the scenario's output.dir unless the
// caller gave an absolute path or an explicit flag.
std::string resolve_path(const std::string& flag_value,
                         const std::string& scenario_value,
                         const std::string& fallback, const OutputPaths& out) {
  std::string name = !flag_value.empty()      ? flag_value
                     : !scenario_value.empty() ? scenario_value
                                               : fallback;
  std::filesystem::path p(name);
  if (!flag_value.empty() || p.is_absolute() || out.dir.empty()) {
    return p.string();
  }
  return (std::filesystem::path(out.dir) / p).string();
}

std::string kv(const std::string& key, const std::string& value) {
  return key + " " + value + "\n";
}

std::string kv(const std::string& key, double value) {
  return kv(key, format_double(value));
}

void emit(const std::string& text, const std::string& file_path) {
  std::cout << text;
  if (!file_path.empty()) write_text_atomic(file_path, text);
}

std::string snapshot_grid_path(const std::string& traj_csv, std::size_t index) {
  std::filesystem::path p(traj_csv);
  std::filesystem::path dir = p.parent_path();
  std::string stem = p.stem().string();
  return (dir / (stem + "_snap" + std::to_string(index) + ".qgrid")).string();
}

int cmd_simulate(const std::string& scenario_path,
                 std::optional<std::uint64_t> seed_override,
                 const std::string& out_flag, const std::string& summary_path,
                 bool skip_snapshots) {
  Scenario sc = load_scenario(scenario_path);
  if (seed_override) sc.sim.seed = *seed_override;

  TrajectoryRecord rec = simulate_trajectory(sc.sim);
  const std::string csv_path =
      resolve_path(out_flag, sc.output.trajectory_csv, "trajectory.csv",
                   sc.output);
  write_trajectory_csv(csv_path, rec);

  std::ostringstream summary;
  summary << kv("scenario", scenario_path);
  summary << kv("trajectory_csv", csv_path);
  summary << kv("seed", format_double(static_cast<double>(sc.sim.seed)));
  summary << kv("valid", rec.valid ? "true" : "false");
  if (!rec.valid) summary << kv("failure_reason", rec.failure_reason);
  summary << kv("final_time", rec.times.back());
  summary << kv("final_n_est", rec.n_est.back());
  summary << kv("final_n_var", rec.n_var.back());
  summary << kv("final_distance", rec.distance.back());
  summary << kv("final_fidelity",
                number_fidelity(rec.final_state, sc.sim.n_star));

  if (!skip_snapshots) {
    for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
      const auto& [t, state] = rec.snapshots[i];
      std::string grid_path = snapshot_grid_path(csv_path, i);
      write_qgrid(grid_path, q_function(state));
      summary << kv("snapshot_" + std::to_string(i) + "_time", t);
      summary << kv("snapshot_" + std::to_string(i) + "_file", grid_path);
    }
  }
  emit(summary.str(), summary_path);
  return rec.valid ? kExitOk : kExitInvalidRun;
}

void write_stats_csv(const std::string& path, const EnsembleStats& stats) {
  std::ostringstream out;
  out << "t,mean_distance,se_distance,mean_n,se_n\n";
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    out << format_double(stats.times[i]) << ','
        << format_double(stats.mean_distance[i]) << ','
        << format_double(stats.se_distance[i]) << ','
        << format_double(stats.mean_n[i]) << ','
        << format_double(stats.se_n[i]) << '\n';
  }
  write_text_atomic(path, out.str());
}

void summarize_slot(std::ostringstream& summary, const std::string& prefix,
                    const EnsembleStats& stats) {
  summary << kv(prefix + "n_total", static_cast<double>(stats.n_total));
  summary << kv(prefix + "n_invalid", static_cast<double>(stats.n_invalid));
  summary << kv(prefix + "success_rate", stats.success_rate);
  summary << kv(prefix + "mean_final_n_var", stats.mean_final_n_var);
  summary << kv(prefix + "terminal_mean_distance",
                stats.mean_distance.back());
  summary << kv(prefix + "terminal_se_distance", stats.se_distance.back());
  MonotonicityReport mono = check_monotone_decrease(stats);
  summary << kv(prefix + "monotone_decrease", mono.pass ? "true" : "false");
  for (const auto& [level, count] : stats.outcome_histogram) {
    std::string name = level == kUncollapsed ? "uncollapsed"
                                             : std::to_string(level);
    summary << kv(prefix + "outcome_" + name, static_cast<double>(count));
  }
  for (const auto& reason : stats.failure_reasons) {
    summary << kv(prefix + "failure_reason", reason);
  }
}

int cmd_ensemble(const std::string& scenario_path, const std::string& out_flag,
                 const std::string& summary_path, int workers_override) {
  Scenario sc = load_scenario(scenario_path);
  if (!sc.has_ensemble) {
    throw std::invalid_argument(scenario_path + ": no ensemble section");
  }
  if (workers_override > 0) sc.ensemble.workers = workers_override;

  const std::string stats_path = resolve_path(
      out_flag, sc.output.stats_csv, "ensemble_stats.csv", sc.output);
  std::ostringstream summary;
  summary << kv("scenario", scenario_path);

  if (!sc.ensemble.kappa_sweep.empty()) {
    auto sweep = run_kappa_sweep(sc.ensemble);
    std::filesystem::path base(stats_path);
    std::string stem = base.stem().string();
    std::string ext = base.extension().string();
    for (std::size_t s = 0; s < sweep.size(); ++s) {
      std::string slot_path =
          (base.parent_path() / (stem + "_k" + std::to_string(s) + ext))
              .string();
      write_stats_csv(slot_path, sweep[s].second);
      std::string prefix = "k" + std::to_string(s) + "_";
      summary << kv(prefix + "kappa", sweep[s].first);
      summary << kv(prefix + "stats_csv", slot_path);
      summarize_slot(summary, prefix, sweep[s].second);
    }
  } else {
    EnsembleStats stats = run_ensemble(sc.ensemble);
    write_stats_csv(stats_path, stats);
    summary << kv("stats_csv", stats_path);
    summarize_slot(summary, "", stats);
  }
  emit(summary.str(), summary_path);
  return kExitOk;
}

std::string feasibility_block(const std::string& convention,
                              const FeasibilityNumbers& n) {
  std::ostringstream out;
  out << kv(convention + ".omega_b", n.omega_b);
  out << kv(convention + ".photon_flux", n.photon_flux);
  out << kv(convention + ".rabi", n.rabi);
  out << kv(convention + ".mode_factor", n.mode_factor);
  out << kv(convention + ".lorentz_factor", n.lorentz_factor);
  out << kv(convention + ".measurement_rate", n.measurement_rate);
  out << kv(convention + ".m_over_kappa", n.m_over_kappa);
  out << kv(convention + ".strong_coupling", n.strong_coupling);
  return out.str();
}

nlohmann::json feasibility_json(const FeasibilityNumbers& n) {
  return {{"omega_b", n.omega_b},
          {"photon_flux", n.photon_flux},
          {"rabi", n.rabi},
          {"mode_factor", n.mode_factor},
          {"lorentz_factor", n.lorentz_factor},
          {"measurement_rate", n.measurement_rate},
          {"m_over_kappa", n.m_over_kappa},
          {"strong_coupling", n.strong_coupling}};
}

int cmd_feasibility(const std::string& scenario_path,
                    const std::string& out_path,
                    const std::string& json_path) {
  Scenario sc = load_scenario(scenario_path);
  if (!sc.has_qed) {
    throw std::invalid_argument(scenario_path + ": no qed section");
  }
  FeasibilityReport rep = feasibility(sc.qed);

  std::ostringstream text;
  text << feasibility_block("as_declared", rep.as_declared);
  text << feasibility_block("all_ordinary", rep.all_ordinary);
  if (rep.kappa_geometry > 0.0) {
    text << kv("kappa_geometry", rep.kappa_geometry);
  }
  emit(text.str(), out_path);

  if (!json_path.empty()) {
    nlohmann::json j = {{"as_declared", feasibility_json(rep.as_declared)},
                        {"all_ordinary", feasibility_json(rep.all_ordinary)}};
    if (rep.kappa_geometry > 0.0) j["kappa_geometry"] = rep.kappa_geometry;
    write_text_atomic(json_path, j.dump(2) + "\n");
  }
  return kExitOk;
}

InitialState parse_state_arg(const std::string& text) {
  if (text == "vacuum") return InitialState::vacuum();
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::string kind = text.substr(0, colon);
    std::string rest = text.substr(colon + 1);
    if (kind == "number") {
      std::size_t pos = 0;
      int m = std::stoi(rest, &pos);
      if (pos == rest.size() && m >= 0) return InitialState::number(m);
    } else if (kind == "coherent") {
      double re = 0.0, im = 0.0;
      std::size_t pos = 0;
      re = std::stod(rest, &pos);
      if (pos == rest.size()) return InitialState::coherent({re, 0.0});
      if (rest[pos] == ',') {
        std::string tail = rest.substr(pos + 1);
        std::size_t pos2 = 0;
        im = std::stod(tail, &pos2);
        if (pos2 == tail.size()) return InitialState::coherent({re, im});
      }
    }
  }
  throw std::invalid_argument(
      "state must be vacuum, number:M, or coherent:RE[,IM]; got '" + text +
      "'");
}

int cmd_qfunc(const std::string& state_arg, int n_max, int nx, int ny,
              double half_width, const std::string& out_path) {
  HilbertConfig cfg(n_max);
  DensityMatrix rho = parse_state_arg(state_arg).realize(cfg);
  QGridSpec spec;
  spec.nx = nx;
  spec.ny = ny;
  spec.half_width = half_width;
  write_qgrid(out_path, q_function(rho, spec));
  std::cout << kv("qgrid", out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback-stabilized photon number measurement toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, out_flag, summary_path, json_path;
  std::string state_arg = "vacuum";
  std::optional<std::uint64_t> seed_override;
  bool skip_snapshots = false;
  int workers_override = 0;
  int n_max = 20, nx = 201, ny = 201;
  double half_width = 0.0;

  CLI::App* sim = app.add_subcommand("simulate", "Integrate one trajectory");
  sim->add_option("--scenario", scenario_path, "Scenario file")->required();
  sim->add_option("--out", out_flag, "Trajectory CSV path");
  sim->add_option("--seed", seed_override, "Override the scenario seed");
  sim->add_option("--summary", summary_path, "Also write the summary here");
  sim->add_flag("--no-snapshots", skip_snapshots,
                "Skip Q-function snapshot grids");

  CLI::App* ens = app.add_subcommand("ensemble", "Run a trajectory ensemble");
  ens->add_option("--scenario", scenario_path, "Scenario file")->required();
  ens->add_option("--out", out_flag, "Stats CSV path (sweeps append _k<i>)");
  ens->add_option("--summary", summary_path, "Also write the summary here");
  ens->add_option("--workers", workers_override,
                  "Worker threads (overrides NUMSTAB_WORKERS)");

  CLI::App* fea =
      app.add_subcommand("feasibility", "Evaluate measurement strength");
  fea->add_option("--scenario", scenario_path, "Scenario file")->required();
  fea->add_option("--out", out_flag, "Also write the report here");
  fea->add_option("--json", json_path, "Write the report as JSON here");

  CLI::App* qf = app.add_subcommand("qfunc", "Phase-space grid of a state");
  qf->add_option("--state", state_arg,
                 "vacuum, number:M, or coherent:RE[,IM]");
  qf->add_option("--n-max", n_max, "Fock truncation")->check(CLI::Range(1, 500));
  qf->add_option("--nx", nx, "Grid points, real axis");
  qf->add_option("--ny", ny, "Grid points, imaginary axis");
  qf->add_option("--half-width", half_width, "Grid half width (0 = auto)");
  qf->add_option("--out", out_flag, "Grid file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(scenario_path, seed_override, out_flag, summary_path,
                          skip_snapshots);
    }
    if (ens->parsed()) {
      return cmd_ensemble(scenario_path, out_flag, summary_path,
                          workers_override);
    }
    if (fea->parsed()) {
      return cmd_feasibility(scenario_path, out_flag, json_path);
    }
    if (qf->parsed()) {
      return cmd_qfunc(state_arg, n_max, nx, ny, half_width,
                       out_flag.empty() ? "qfunc.qgrid" : out_flag);
    }
  } catch (const AllInvalidError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidRun;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
