#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "omem/commands.hpp"
#include "omem/errors.hpp"
#include "omem/version.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kVerification = 3 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> skip_cycles;
};

omem::cli::RunConfig load(const Flags& f) {
  auto cfg = omem::cli::load_config(f.config);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.skip_cycles) cfg.analysis.skip_cycles = *f.skip_cycles;
  if (cfg.optimizer) {
    if (f.seed) cfg.optimizer->ga.seed = *f.seed;
    if (f.jobs) cfg.optimizer->ga.jobs = *f.jobs;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed optomechanics memory simulator"};
  app.set_version_flag("--version", std::string(omem::kVersion));
  app.require_subcommand(1);

  Flags f;
  auto common = [&f](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", f.out, "output directory (overrides output_dir)");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate the configured drive");
  common(simulate, true);

  std::string trajectory;
  std::optional<double> period;
  std::string output = "photon";
  auto* analyze = app.add_subcommand("analyze", "loop metrics for a trajectory CSV");
  analyze->add_option("trajectory", trajectory, "trajectory CSV")->required()->check(CLI::ExistingFile);
  common(analyze, false);
  analyze->add_option("--period", period, "drive period (else taken from --config)");
  analyze->add_option("--output", output, "observable: photon, phonon, x_c, p_c, x_m, p_m");
  analyze->add_option("--skip-cycles", f.skip_cycles, "leading cycles to drop");

  auto* optimize = app.add_subcommand("optimize", "genetic search for the largest mean form factor");
  common(optimize, true);
  optimize->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
  optimize->add_option("--seed", f.seed, "GA seed");
  optimize->add_option("--skip-cycles", f.skip_cycles, "leading cycles to drop");

  auto* sweep = app.add_subcommand("sweep", "metrics over a parameter grid");
  common(sweep, true);
  sweep->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
  sweep->add_option("--skip-cycles", f.skip_cycles, "leading cycles to drop");

  double delta_kappa = 1.0;
  auto* verify = app.add_subcommand("verify", "built-in oracle checks");
  verify->add_option("--out", f.out, "write verify.json here");
  verify->add_option("--kappa", delta_kappa, "cavity damping for the delta-pulse area check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto cfg = load(f);
      const auto traj = omem::cli::cmd_simulate(cfg, cfg.output_dir);
      std::cout << "wrote " << traj.size() << " samples to " << (cfg.output_dir / "trajectory.csv").string()
                << '\n';
    } else if (*analyze) {
      omem::AnalysisOptions opt;
      std::filesystem::path out = f.out.empty() ? "omem_out" : f.out;
      if (!f.config.empty()) {
        const auto cfg = load(f);
        opt = cfg.analysis;
        if (!period) period = omem::period(omem::cli::resolve_drive(cfg));
        if (f.out.empty()) out = cfg.output_dir;
      }
      if (!period) throw omem::ValidationError("analyze: give --period or a --config with a drive");
      if (analyze->count("--output") > 0 || f.config.empty()) {
        const auto obs = omem::parse_observable(output);
        if (!obs) throw omem::ValidationError("analyze: unknown observable '" + output + "'");
        opt.output = *obs;
      }
      if (f.skip_cycles) opt.skip_cycles = *f.skip_cycles;
      const auto s = omem::cli::cmd_analyze(trajectory, *period, opt, out);
      std::printf("cycles %zu  mean F %.6f  storing %s\n", s.cycles.size(), s.mean_form_factor,
                  std::string(omem::to_string(s.storing)).c_str());
    } else if (*optimize) {
      const auto cfg = load(f);
      const auto r = omem::cli::cmd_optimize(cfg, cfg.output_dir);
      std::printf("best F %.6f after %zu generations (%zu evaluations)\n", -r.best_cost, r.generations_run,
                  r.evaluations);
    } else if (*sweep) {
      const auto cfg = load(f);
      const auto rows = omem::cli::cmd_sweep(cfg, cfg.output_dir, f.jobs.value_or(0));
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      std::printf("%zu grid points, %zu failed\n", rows.size(), failed);
    } else if (*verify) {
      omem::cli::VerifyOptions opt;
      opt.delta_kappa = delta_kappa;
      const auto report = omem::cli::cmd_verify(opt, f.out);
      for (const auto& c : report.checks) {
        std::printf("%-24s %s  value %.3g  tol %.3g  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                    c.tolerance, c.detail.c_str());
      }
      return report.passed() ? kOk : kVerification;
    }
  } catch (const omem::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const omem::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
