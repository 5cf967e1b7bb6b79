#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "omem/analysis.hpp"
#include "omem/drives.hpp"
#include "omem/integrator.hpp"
#include "omem/model.hpp"
#include "omem/optimizer.hpp"

namespace omem::cli {

inline constexpr int kSchemaVersion = 1;

struct IntegratorOverrides {
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  std::optional<double> sample_dt;
  std::optional<std::size_t> max_steps;
};

struct OptimizerSection {
  DriveKind kind = DriveKind::square_sinusoidal;
  SearchSpace space;
  GaConfig ga;
};

struct SweepAxis {
  std::string name;  // e0, t_s, sigma, omega or sigma_over_t_s
  std::vector<double> values;
};

/// Everything a run needs. Parsed from a JSON document; see README for keys.
struct RunConfig {
  OmParams params;
  std::optional<DriveSpec> drive;
  std::optional<double> sigma_over_t_s;  // gaussian width tied to t_s
  MeanFieldState initial_state;
  IntegratorOverrides integrator;
  std::size_t cycles = 5;
  AnalysisOptions analysis;
  std::optional<OptimizerSection> optimizer;
  std::vector<SweepAxis> sweep;
  std::filesystem::path output_dir = "omem_out";
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved document; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& cfg);

/// The configured drive with sigma_over_t_s applied. Throws if absent.
DriveSpec resolve_drive(const RunConfig& cfg);

/// Drive defaults with the config's overrides applied.
IntegratorConfig resolve_integrator(const RunConfig& cfg, const DriveSpec& drive);

}  // namespace omem::cli
