#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omem/analysis.hpp"
#include "omem/drives.hpp"
#include "omem/integrator.hpp"
#include "omem/model.hpp"

namespace omem {

struct ParameterBound {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
};

/// Box constraints on the drive parameters theta.
struct SearchSpace {
  std::vector<ParameterBound> bounds;

  std::size_t dimension() const noexcept { return bounds.size(); }
  bool contains(std::span<const double> theta) const noexcept;
  void validate() const;

  /// Ranges spanned by the reference optima for `kind`, widened by x0.1 / x10.
  static SearchSpace defaults_for(DriveKind kind);
};

/// Parameter names theta is laid out in: (e0, t_s, sigma) for Gaussian trains,
/// (e0, omega) for the two sinusoidal drives.
std::vector<std::string> drive_parameter_names(DriveKind kind);

/// DriveSpec for a parameter vector. Throws ValidationError for kinds that
/// cannot be parameterized or a theta of the wrong length.
DriveSpec make_drive(DriveKind kind, std::span<const double> theta);

struct GaConfig {
  std::size_t population = 0;  ///< 0 selects 50 + 10 d
  std::size_t generations = 100;
  double mutation_sigma = 0.1;   ///< std of the Gaussian mutation, as a fraction of each range
  double mutation_shrink = 1.0;  ///< mutation std decays as (1 - shrink g / generations)
  double crossover_rate = 0.8;
  double blend_alpha = 0.5;      ///< BLX-alpha crossover
  std::size_t tournament_size = 3;
  std::size_t elitism = 2;
  std::uint64_t seed = 0;
  std::size_t cycles = 5;        ///< N drive cycles averaged in the cost
  std::optional<double> target_cost;  ///< stop once the best cost is <= this
  std::size_t jobs = 0;          ///< concurrent objective evaluations (0 = hardware threads)

  std::size_t population_for(std::size_t dimension) const noexcept {
    return population > 0 ? population : 50 + 10 * dimension;
  }
  void validate() const;
};

struct OptResult {
  std::vector<double> theta_star;
  double best_cost = 0.0;
  std::vector<double> best_cost_history;  ///< best cost after each generation
  std::vector<double> cycle_form_factors; ///< per-cycle F at theta_star (filled by optimize_drive)
  std::size_t evaluations = 0;
  std::size_t generations_run = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Generational real-coded GA minimizing `objective`: uniform initialization,
/// tournament selection, blend crossover, clamped Gaussian mutation and
/// elitism. All random draws for a generation happen before its evaluations
/// are dispatched, so the result depends only on the seed, not on cfg.jobs.
OptResult ga_optimize(const SearchSpace& space, const Objective& objective, const GaConfig& cfg);

/// Everything the cycle-averaged form-factor cost needs besides theta.
struct CostOptions {
  OmParams params;
  DriveKind kind = DriveKind::square_sinusoidal;
  Observable output = Observable::photon;
  std::size_t cycles = 5;
  std::size_t skip_cycles = 0;
  bool include_open_cycles = false;
  /// Tolerance overrides; sampling and step limits always follow the drive.
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
};

struct CostEvaluation {
  double cost = 0.0;                  ///< -(1/N) sum F over the cycles used
  std::vector<double> form_factors;   ///< every analysed cycle
  std::vector<char> closed;
  bool failed = false;                ///< integration failed; cost is the penalty 0
  std::string failure;
};

/// Integrates (skip_cycles + cycles) periods from vacuum and averages the
/// per-cycle form factors. Numerical failures give cost 0; an invalid theta
/// throws ValidationError. For sinusoidal drives, form factors above 0.52
/// are reported through warn().
CostEvaluation evaluate_cost(std::span<const double> theta, const CostOptions& opt);

inline double cost(std::span<const double> theta, const CostOptions& opt) {
  return evaluate_cost(theta, opt).cost;
}

/// ga_optimize over `space` with the form-factor cost, then re-evaluates
/// theta_star to fill OptResult::cycle_form_factors.
OptResult optimize_drive(const SearchSpace& space, const CostOptions& opt, const GaConfig& cfg);

}  // namespace omem
