#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "omem/analysis.hpp"
#include "omem/commands.hpp"
#include "omem/config.hpp"
#include "omem/errors.hpp"
#include "omem/integrator.hpp"
#include "omem/trajectory.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json sin_doc() {
  return json::parse(R"({
    "schema_version": 1,
    "params": {"quality": 1e4},
    "drive": {"kind": "sinusoidal", "e0": 8.745e4, "omega": 1.055},
    "simulation": {"cycles": 3}
  })");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("omem_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Config, MinimalDocument) {
  const auto cfg = omem::cli::parse_config(sin_doc());
  EXPECT_EQ(cfg.params.quality, 1e4);
  ASSERT_TRUE(cfg.drive.has_value());
  EXPECT_EQ(cfg.drive->kind, omem::DriveKind::sinusoidal);
  EXPECT_EQ(cfg.cycles, 3u);
}

TEST(Config, RejectsUnknownKey) {
  auto doc = sin_doc();
  doc["drive"]["amplitude"] = 1.0;
  try {
    omem::cli::parse_config(doc);
    FAIL() << "expected ValidationError";
  } catch (const omem::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("drive.amplitude"), std::string::npos);
  }
}

TEST(Config, RequiresSchemaVersionAndQuality) {
  auto doc = sin_doc();
  doc.erase("schema_version");
  EXPECT_THROW(omem::cli::parse_config(doc), omem::ValidationError);
  doc = sin_doc();
  doc["schema_version"] = 2;
  EXPECT_THROW(omem::cli::parse_config(doc), omem::ValidationError);
  doc = sin_doc();
  doc["params"].erase("quality");
  EXPECT_THROW(omem::cli::parse_config(doc), omem::ValidationError);
}

TEST(Config, WrongTypeIsValidationError) {
  auto doc = sin_doc();
  doc["drive"]["e0"] = "big";
  EXPECT_THROW(omem::cli::parse_config(doc), omem::ValidationError);
}

TEST(Config, RoundTrip) {
  auto doc = json::parse(R"({
    "schema_version": 1,
    "params": {"quality": 1e4, "delta": 0.5},
    "drive": {"kind": "gaussian_train", "e0": 3e5, "t_s": 20, "sigma_over_t_s": 0.25},
    "integrator": {"rel_tol": 1e-8},
    "analysis": {"output": "phonon", "skip_cycles": 1},
    "optimizer": {"drive": "gaussian_train", "generations": 7, "seed": 42,
                  "bounds": {"e0": [1e5, 1e6], "t_s": [10, 30], "sigma": [0.2, 0.4]}},
    "sweep": {"e0": [1e5, 2e5]},
    "output_dir": "somewhere"
  })");
  const auto cfg = omem::cli::parse_config(doc);
  const auto again = omem::cli::to_json(omem::cli::parse_config(omem::cli::to_json(cfg)));
  EXPECT_EQ(omem::cli::to_json(cfg), again);
  EXPECT_DOUBLE_EQ(omem::cli::resolve_drive(cfg).sigma, 5.0);
  EXPECT_EQ(cfg.optimizer->ga.generations, 7u);
  EXPECT_EQ(cfg.analysis.output, omem::Observable::phonon);
}

TEST(Config, LoadsFileWithComments) {
  const auto dir = scratch("load");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << "// run\n" << sin_doc().dump(2);
  }
  EXPECT_NO_THROW(omem::cli::load_config(dir / "c.json"));
  EXPECT_THROW(omem::cli::load_config(dir / "missing.json"), omem::ValidationError);
}

TEST(Commands, SimulateThenAnalyzeMatchesInMemory) {
  const auto dir = scratch("sim");
  const auto cfg = omem::cli::parse_config(sin_doc());
  const auto traj = omem::cli::cmd_simulate(cfg, dir);
  ASSERT_TRUE(fs::exists(dir / "trajectory.csv"));
  ASSERT_TRUE(fs::exists(dir / "manifest.json"));
  std::ifstream mf(dir / "manifest.json");
  const auto manifest = json::parse(mf);
  EXPECT_EQ(manifest["command"], "simulate");
  EXPECT_EQ(manifest["config"], omem::cli::to_json(cfg));

  const auto mem = omem::analyze(traj, cfg.analysis);
  const auto disk = omem::cli::cmd_analyze(dir / "trajectory.csv", traj.period, cfg.analysis, dir);
  ASSERT_EQ(mem.cycles.size(), disk.cycles.size());
  for (std::size_t i = 0; i < mem.cycles.size(); ++i) {
    EXPECT_NEAR(mem.cycles[i].form_factor, disk.cycles[i].form_factor, 1e-12);
    EXPECT_NEAR(mem.cycles[i].area, disk.cycles[i].area, 1e-12);
  }
  EXPECT_TRUE(fs::exists(dir / "metrics.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Commands, ZeroDriveStaysInVacuum) {
  auto doc = sin_doc();
  doc["drive"]["e0"] = 0.0;
  const auto traj = omem::cli::cmd_simulate(omem::cli::parse_config(doc), scratch("zero"));
  for (const auto& s : traj.states) {
    EXPECT_EQ(s.x_c, 0.0);
    EXPECT_EQ(s.p_c, 0.0);
    EXPECT_EQ(s.x_m, 0.0);
    EXPECT_EQ(s.p_m, 0.0);
  }
}

TEST(Commands, SinglePointSweepMatchesSimulate) {
  auto doc = sin_doc();
  doc["sweep"] = {{"e0", {8.745e4}}};
  const auto cfg = omem::cli::parse_config(doc);
  const auto dir = scratch("sweep1");
  const auto rows = omem::cli::cmd_sweep(cfg, dir, 1);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].ok);
  const auto direct = omem::analyze(omem::cli::cmd_simulate(cfg, scratch("sweep1b")), cfg.analysis);
  EXPECT_DOUBLE_EQ(rows[0].summary.mean_form_factor, direct.mean_form_factor);
  EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
}

TEST(Commands, SweepRecordsFailuresAndContinues) {
  auto doc = sin_doc();
  doc["sweep"] = {{"omega", {1.0, -1.0, 2.0}}};
  const auto rows = omem::cli::cmd_sweep(omem::cli::parse_config(doc), scratch("sweep2"), 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].ok);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_TRUE(rows[2].ok);
}

TEST(Commands, SweepRejectsAxisForWrongDrive) {
  auto doc = sin_doc();
  doc["sweep"] = {{"t_s", {10.0}}};
  EXPECT_THROW(omem::cli::cmd_sweep(omem::cli::parse_config(doc), scratch("sweep3"), 1),
               omem::ValidationError);
}

TEST(Commands, VerifyChecks) {
  const auto dir = scratch("verify");
  const auto report = omem::cli::cmd_verify({}, dir);
  ASSERT_TRUE(fs::exists(dir / "verify.json"));
  auto find = [&](const std::string& name) {
    for (const auto& c : report.checks) {
      if (c.name == name) return c;
    }
    ADD_FAILURE() << "missing check " << name;
    return omem::cli::VerifyCheck{};
  };
  EXPECT_TRUE(find("oscillator_residual").passed);
  EXPECT_TRUE(find("oscillator_uncoupled").passed);
  EXPECT_TRUE(find("integral_photon").passed);
  EXPECT_TRUE(find("integral_phonon").passed);
  EXPECT_TRUE(find("delta_pulse_dissipation").passed);
  // The regularized kick area grows like 1/sigma, so this one cannot pass.
  EXPECT_FALSE(find("delta_pulse_area").passed);
  EXPECT_FALSE(report.passed());
}

TEST(Commands, VerifyCatchesWrongSign) {
  const omem::OmParams p;
  omem::cli::VerifyOptions opt;
  opt.field = [p](const omem::MeanFieldState& s, double e) {
    // Flip the sign of the radiation-pressure term only.
    auto d = omem::rhs(s, p, e);
    const double linear = -omem::derive_gamma_m(p) * s.p_m - p.omega_m * s.x_m;
    d.p_m = 2.0 * linear - d.p_m;
    return d;
  };
  const auto report = omem::cli::cmd_verify(opt);
  for (const auto& c : report.checks) {
    if (c.name == "oscillator_residual") EXPECT_FALSE(c.passed);
  }
}

TEST(Commands, OptimizeIsDeterministic) {
  auto doc = sin_doc();
  doc["optimizer"] = json::parse(R"({"drive": "sinusoidal", "population": 8, "generations": 2,
                                     "cycles": 2, "seed": 5,
                                     "bounds": {"e0": [5e4, 1e5], "omega": [1.0, 2.0]}})");
  const auto cfg = omem::cli::parse_config(doc);
  const auto dir = scratch("opt");
  const auto a = omem::cli::cmd_optimize(cfg, dir);
  const auto b = omem::cli::cmd_optimize(cfg, scratch("opt2"));
  EXPECT_EQ(a.theta_star, b.theta_star);
  EXPECT_EQ(a.best_cost, b.best_cost);
  EXPECT_EQ(a.cycle_form_factors.size(), 2u);
  for (const char* f : {"report.json", "history.csv", "best_trajectory.csv", "loops.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

}  // namespace
