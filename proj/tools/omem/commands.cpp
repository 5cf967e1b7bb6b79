#include "omem/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "omem/delta_pulse.hpp"
#include "omem/errors.hpp"
#include "omem/parallel.hpp"
#include "omem/version.hpp"

namespace omem::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    Clock::time_point started) {
  const double wall = std::chrono::duration<double>(Clock::now() - started).count();
  write_json(dir / "manifest.json", {{"tool", "omem"},
                                     {"version", std::string(kVersion)},
                                     {"command", command},
                                     {"wall_time_s", wall},
                                     {"config", to_json(cfg)}});
}

json plateaus_json(const std::optional<JumpReport>& jumps) {
  if (!jumps) return nullptr;
  json list = json::array();
  for (const auto& p : jumps->plateaus) {
    list.push_back({{"level", p.level}, {"t_start", p.t_start}, {"t_end", p.t_end}, {"windows", p.windows}});
  }
  return {{"plateaus", list}, {"jump_times", jumps->jump_times}};
}

json summary_json(const AnalysisSummary& s) {
  std::size_t max_x = 0;
  for (const auto& c : s.cycles) max_x = std::max(max_x, c.n_intersections);
  return {{"cycles", s.cycles.size()},
          {"used_cycles", s.used_cycles},
          {"mean_form_factor", s.mean_form_factor},
          {"max_intersections", max_x},
          {"storing", std::string(to_string(s.storing))},
          {"phonon_jumps", plateaus_json(s.phonon_jumps)}};
}

Trajectory simulate(const RunConfig& cfg, const DriveSpec& drive, std::size_t cycles) {
  const auto ic = resolve_integrator(cfg, drive);
  return integrate(cfg.params, drive, cfg.initial_state, static_cast<double>(cycles) * period(drive), ic);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Applies one sweep coordinate to a copy of the config.
void apply_axis(RunConfig& cfg, const std::string& name, double value) {
  auto& d = *cfg.drive;
  const bool pulsed = d.kind == DriveKind::gaussian_train || d.kind == DriveKind::delta_pulse;
  const bool periodic = d.kind == DriveKind::sinusoidal || d.kind == DriveKind::square_sinusoidal;
  if (name == "e0" && d.kind != DriveKind::tabulated) {
    d.e0 = value;
  } else if (name == "t_s" && pulsed) {
    d.t_s = value;
  } else if (name == "sigma" && pulsed) {
    d.sigma = value;
    cfg.sigma_over_t_s.reset();
  } else if (name == "sigma_over_t_s" && d.kind == DriveKind::gaussian_train) {
    cfg.sigma_over_t_s = value;
  } else if (name == "omega" && periodic) {
    d.omega = value;
  } else {
    throw ValidationError("sweep: axis '" + name + "' does not apply to drive kind " +
                          std::string(to_string(d.kind)));
  }
}

}  // namespace

Trajectory cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  const auto started = Clock::now();
  const auto drive = resolve_drive(cfg);
  auto traj = simulate(cfg, drive, cfg.cycles);
  ensure_dir(out_dir);
  write_trajectory_csv(out_dir / "trajectory.csv", traj);
  write_manifest(out_dir, "simulate", cfg, started);
  return traj;
}

AnalysisSummary cmd_analyze(const fs::path& trajectory_csv, double period, const AnalysisOptions& opt,
                            const fs::path& out_dir) {
  const auto traj = read_trajectory_csv(trajectory_csv, period);
  auto summary = analyze(traj, opt);
  ensure_dir(out_dir);
  write_metrics_csv(out_dir / "metrics.csv", summary.cycles);
  auto doc = summary_json(summary);
  doc["source"] = trajectory_csv.string();
  doc["period"] = period;
  doc["output"] = std::string(to_string(opt.output));
  doc["skip_cycles"] = opt.skip_cycles;
  write_json(out_dir / "summary.json", doc);
  return summary;
}

OptResult cmd_optimize(const RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.optimizer) throw ValidationError("config: optimizer: missing required section");
  const auto started = Clock::now();
  const auto& sec = *cfg.optimizer;

  CostOptions copt;
  copt.params = cfg.params;
  copt.kind = sec.kind;
  copt.output = cfg.analysis.output;
  copt.skip_cycles = cfg.analysis.skip_cycles;
  copt.include_open_cycles = cfg.analysis.include_open_cycles;
  copt.rel_tol = cfg.integrator.rel_tol;
  copt.abs_tol = cfg.integrator.abs_tol;
  const auto result = optimize_drive(sec.space, copt, sec.ga);

  ensure_dir(out_dir);
  const auto names = drive_parameter_names(sec.kind);
  json theta = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) theta[names[i]] = result.theta_star[i];
  write_json(out_dir / "report.json", {{"drive", std::string(to_string(sec.kind))},
                                       {"output", std::string(to_string(copt.output))},
                                       {"theta_star", theta},
                                       {"best_cost", result.best_cost},
                                       {"best_form_factor", -result.best_cost},
                                       {"cycle_form_factors", result.cycle_form_factors},
                                       {"evaluations", result.evaluations},
                                       {"generations_run", result.generations_run},
                                       {"population", sec.ga.population_for(names.size())},
                                       {"seed", sec.ga.seed}});
  {
    std::ofstream h(out_dir / "history.csv");
    if (!h) throw ValidationError("cannot write " + (out_dir / "history.csv").string());
    h << "generation,best_cost,best_form_factor\n";
    for (std::size_t g = 0; g < result.best_cost_history.size(); ++g) {
      h << g << ',' << fmt_double(result.best_cost_history[g]) << ','
        << fmt_double(-result.best_cost_history[g]) << '\n';
    }
  }

  const auto drive = make_drive(sec.kind, result.theta_star);
  const auto traj = simulate(cfg, drive, copt.skip_cycles + sec.ga.cycles);
  write_trajectory_csv(out_dir / "best_trajectory.csv", traj);
  {
    std::ofstream l(out_dir / "loops.csv");
    if (!l) throw ValidationError("cannot write " + (out_dir / "loops.csv").string());
    l << "cycle,x,y\n";
    for (const auto& loop : normalize(traj, copt.output, copt.skip_cycles)) {
      for (const auto& p : loop.points) {
        l << loop.cycle_index << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << '\n';
      }
    }
  }
  write_manifest(out_dir, "optimize", cfg, started);
  return result;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::size_t jobs) {
  if (cfg.sweep.empty()) throw ValidationError("config: sweep: missing required section");
  if (!cfg.drive) throw ValidationError("config: drive: missing required section");
  const auto started = Clock::now();
  const auto& axes = cfg.sweep;

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<SweepRow> rows(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    rows[i].point.resize(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      rows[i].point[k] = axes[k].values[rest % axes[k].values.size()];
      rest /= axes[k].values.size();
    }
  }
  // Reject axes that do not fit the drive before spending any time.
  {
    RunConfig probe = cfg;
    for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(probe, axes[k].name, axes[k].values.front());
  }

  parallel_for(total, jobs, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      RunConfig local = cfg;
      for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(local, axes[k].name, row.point[k]);
      const auto drive = resolve_drive(local);
      row.summary = analyze(simulate(local, drive, local.cycles), local.analysis);
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  ensure_dir(out_dir);
  std::ofstream out(out_dir / "sweep.csv");
  if (!out) throw ValidationError("cannot write " + (out_dir / "sweep.csv").string());
  for (const auto& a : axes) out << a.name << ',';
  out << "status,mean_form_factor,used_cycles,max_intersections,storing,plateaus,error\n";
  for (const auto& row : rows) {
    for (double v : row.point) out << fmt_double(v) << ',';
    if (row.ok) {
      std::size_t max_x = 0;
      for (const auto& c : row.summary.cycles) max_x = std::max(max_x, c.n_intersections);
      out << "ok," << fmt_double(row.summary.mean_form_factor) << ',' << row.summary.used_cycles << ','
          << max_x << ',' << to_string(row.summary.storing) << ',';
      if (row.summary.phonon_jumps) out << row.summary.phonon_jumps->plateaus.size();
      out << ",\n";
    } else {
      std::string msg = row.error;
      for (auto& ch : msg) {
        if (ch == '"') ch = '\'';
      }
      out << "error,,,,,,\"" << msg << "\"\n";
    }
  }
  write_manifest(out_dir, "sweep", cfg, started);
  return rows;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

VerifyReport cmd_verify(const VerifyOptions& opt, const fs::path& out_dir) {
  VerifyReport report;
  auto add = [&report](std::string name, bool ok, double value, double tol, std::string detail) {
    report.checks.push_back({std::move(name), ok, value, tol, std::move(detail)});
  };

  // Delta pulse against the closed-form area, kappa t_s = 3.
  {
    OmParams p;
    p.g_m = 0.0;
    p.kappa = opt.delta_kappa;
    const double t_s = opt.delta_kappa > 0.0 ? 3.0 / opt.delta_kappa : 3.0;
    const auto r = verify_delta_pulse(p, 1.0, t_s);
    std::ostringstream d;
    d << "numeric " << r.numeric_area << ", analytic " << r.analytic_area << ", order " << r.estimated_order;
    for (const auto& w : r.warnings) d << "; " << w;
    add("delta_pulse_area", r.converged && r.relative_error <= 0.02, r.relative_error, 0.02, d.str());
  }
  // Dissipation dependence at fixed kappa t_s.
  {
    std::vector<double> numeric, analytic;
    for (double kappa : {1.0, 0.1, 0.01}) {
      OmParams p;
      p.g_m = 0.0;
      p.kappa = kappa;
      const auto r = verify_delta_pulse(p, 1.0, 3.0 / kappa);
      numeric.push_back(r.numeric_area);
      analytic.push_back(r.analytic_area);
    }
    const bool decreasing = numeric[0] > numeric[1] && numeric[1] > numeric[2] && analytic[0] > analytic[1] &&
                            analytic[1] > analytic[2];
    const double zero = analytic_delta_area(0.0, 20.0, 1.0, 3.0);
    std::ostringstream d;
    d << "numeric " << numeric[0] << " > " << numeric[1] << " > " << numeric[2] << ", analytic at kappa 0 = "
      << zero;
    add("delta_pulse_dissipation", decreasing && zero == 0.0, numeric[2] / numeric[0], 1.0, d.str());
  }

  const auto drive = DriveSpec::gaussian_train(1e4, 5.0, 0.5);
  const double horizon = 5.0 * period(drive);
  const auto ic = IntegratorConfig::defaults_for(drive);
  OmParams params;
  const auto traj = opt.field ? integrate(*opt.field, drive, MeanFieldState{}, horizon, ic)
                              : integrate(params, drive, MeanFieldState{}, horizon, ic);
  {
    const auto r = oscillator_residual(traj, params);
    add("oscillator_residual", r.relative_norm < 1e-4, r.relative_norm, 1e-4, "relative L2 residual");
  }
  {
    OmParams bare = params;
    bare.g_m = 0.0;
    const auto t0 = integrate(bare, drive, MeanFieldState{}, horizon, ic);
    const auto r = oscillator_residual(t0, bare);
    double worst = 0.0;
    for (double v : r.residual) worst = std::max(worst, std::abs(v));
    add("oscillator_uncoupled", worst <= 1e-12, worst, 1e-12, "max |residual| with g_m = 0");
  }
  {
    const auto dev = integral_representation_check(traj, params);
    add("integral_photon", dev.photon < 1e-3, dev.photon, 1e-3, "max relative deviation");
    add("integral_phonon", dev.phonon < 1e-3, dev.phonon, 1e-3, "max relative deviation");
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    json list = json::array();
    for (const auto& c : report.checks) {
      list.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
    }
    write_json(out_dir / "verify.json",
               {{"version", std::string(kVersion)}, {"passed", report.passed()}, {"checks", list}});
  }
  return report;
}

}  // namespace omem::cli
