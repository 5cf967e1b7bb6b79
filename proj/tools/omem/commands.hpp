#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "omem/config.hpp"
#include "omem/trajectory.hpp"

namespace omem::cli {

namespace fs = std::filesystem;

/// Integrates cfg.cycles periods; writes trajectory.csv and manifest.json.
Trajectory cmd_simulate(const RunConfig& cfg, const fs::path& out_dir);

/// Reads a trajectory CSV; writes metrics.csv and summary.json.
AnalysisSummary cmd_analyze(const fs::path& trajectory_csv, double period, const AnalysisOptions& opt,
                            const fs::path& out_dir);

/// Runs the GA; writes report.json, history.csv, best_trajectory.csv,
/// loops.csv and manifest.json.
OptResult cmd_optimize(const RunConfig& cfg, const fs::path& out_dir);

struct SweepRow {
  std::vector<double> point;  // one value per axis, in axis order
  bool ok = false;
  std::string error;
  AnalysisSummary summary;
};

/// Cartesian product of the sweep axes, run on `jobs` workers. A failing
/// point is recorded in its row and the sweep continues.
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::size_t jobs);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

struct VerifyOptions {
  double delta_kappa = 1.0;            // cavity damping in the single delta-pulse check
  std::optional<VectorField> field;    // replaces the model right-hand side (test hook)
};

/// Built-in oracle checks. Writes verify.json when out_dir is non-empty.
VerifyReport cmd_verify(const VerifyOptions& opt, const fs::path& out_dir = {});

}  // namespace omem::cli
