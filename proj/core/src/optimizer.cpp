#include "omem/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "omem/errors.hpp"
#include "omem/log.hpp"
#include "omem/parallel.hpp"

namespace omem {
namespace {

struct Individual {
  std::vector<double> genes;
  double cost = 0.0;
  bool evaluated = false;
};

constexpr double kPinchedCeiling = 0.52;

}  // namespace

bool SearchSpace::contains(std::span<const double> theta) const noexcept {
  if (theta.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= bounds[i].lower && theta[i] <= bounds[i].upper)) return false;
  }
  return true;
}

void SearchSpace::validate() const {
  if (bounds.empty()) throw ValidationError("search space: no parameters");
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
      throw ValidationError("search space: bounds for '" + b.name + "' must be finite with lower < upper");
    }
  }
}

SearchSpace SearchSpace::defaults_for(DriveKind kind) {
  auto widen = [](std::string name, double lo, double hi) {
    return ParameterBound{std::move(name), 0.1 * lo, 10.0 * hi};
  };
  switch (kind) {
    case DriveKind::gaussian_train:
      return {{widen("e0", 2.015e5, 5.717e5), widen("t_s", 16.119, 30.974), widen("sigma", 0.224, 0.313)}};
    case DriveKind::sinusoidal:
      return {{widen("e0", 7.895e4, 8.745e4), widen("omega", 1.055, 1.918)}};
    case DriveKind::square_sinusoidal:
      return {{widen("e0", 2.173e5, 7.498e5), widen("omega", 1.644, 2.794)}};
    default:
      throw ValidationError("search space: drive kind '" + std::string(to_string(kind)) +
                            "' has no parameterization");
  }
}

std::vector<std::string> drive_parameter_names(DriveKind kind) {
  switch (kind) {
    case DriveKind::gaussian_train: return {"e0", "t_s", "sigma"};
    case DriveKind::sinusoidal:
    case DriveKind::square_sinusoidal: return {"e0", "omega"};
    default:
      throw ValidationError("drive kind '" + std::string(to_string(kind)) + "' has no parameterization");
  }
}

DriveSpec make_drive(DriveKind kind, std::span<const double> theta) {
  const auto names = drive_parameter_names(kind);
  if (theta.size() != names.size()) {
    throw ValidationError("theta has " + std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(names.size()));
  }
  DriveSpec d;
  switch (kind) {
    case DriveKind::gaussian_train: d = DriveSpec::gaussian_train(theta[0], theta[1], theta[2]); break;
    case DriveKind::sinusoidal: d = DriveSpec::sinusoidal(theta[0], theta[1]); break;
    default: d = DriveSpec::square_sinusoidal(theta[0], theta[1]); break;
  }
  d.validate();
  return d;
}

void GaConfig::validate() const {
  if (population != 0 && population < 4) throw ValidationError("ga: population must be >= 4");
  if (generations < 1) throw ValidationError("ga: generations must be >= 1");
  if (!(mutation_sigma > 0.0 && mutation_sigma < 1.0)) {
    throw ValidationError("ga: mutation_sigma must be in (0, 1)");
  }
  if (!(mutation_shrink >= 0.0 && mutation_shrink <= 1.0)) {
    throw ValidationError("ga: mutation_shrink must be in [0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw ValidationError("ga: crossover_rate must be in [0, 1]");
  }
  if (!(blend_alpha >= 0.0)) throw ValidationError("ga: blend_alpha must be >= 0");
  if (tournament_size < 1) throw ValidationError("ga: tournament_size must be >= 1");
  if (cycles < 1) throw ValidationError("ga: cycles must be >= 1");
}

OptResult ga_optimize(const SearchSpace& space, const Objective& objective, const GaConfig& cfg) {
  space.validate();
  cfg.validate();
  const std::size_t d = space.dimension();
  const std::size_t pop_size = cfg.population_for(d);
  const std::size_t elites = std::min(cfg.elitism, pop_size);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto clamp_genes = [&](std::vector<double>& g) {
    for (std::size_t i = 0; i < d; ++i) g[i] = std::clamp(g[i], space.bounds[i].lower, space.bounds[i].upper);
  };

  OptResult result;
  auto evaluate = [&](std::vector<Individual>& pop) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!pop[i].evaluated) todo.push_back(i);
    }
    parallel_for(todo.size(), cfg.jobs, [&](std::size_t k) {
      auto& ind = pop[todo[k]];
      ind.cost = objective(ind.genes);
      ind.evaluated = true;
    });
    result.evaluations += todo.size();
  };
  auto by_cost = [](const Individual& a, const Individual& b) { return a.cost < b.cost; };

  std::vector<Individual> pop(pop_size);
  for (auto& ind : pop) {
    ind.genes.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& b = space.bounds[i];
      ind.genes[i] = b.lower + unit(rng) * (b.upper - b.lower);
    }
  }
  evaluate(pop);
  std::stable_sort(pop.begin(), pop.end(), by_cost);
  result.best_cost_history.push_back(pop.front().cost);

  auto tournament = [&]() -> const Individual& {
    std::size_t best = pop_size;
    for (std::size_t k = 0; k < cfg.tournament_size; ++k) {
      const auto pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(pop_size)) % pop_size;
      if (best == pop_size || pop[pick].cost < pop[best].cost) best = pick;
    }
    return pop[best];
  };

  std::size_t generation = 1;
  auto reached = [&] { return cfg.target_cost && pop.front().cost <= *cfg.target_cost; };
  for (; generation < cfg.generations && !reached(); ++generation) {
    const double scale =
        cfg.mutation_sigma *
        std::max(0.0, 1.0 - cfg.mutation_shrink * static_cast<double>(generation) /
                                static_cast<double>(cfg.generations));
    std::vector<Individual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elites));
    while (next.size() < pop_size) {
      Individual c1{tournament().genes};
      Individual c2{tournament().genes};
      if (unit(rng) < cfg.crossover_rate) {
        for (std::size_t i = 0; i < d; ++i) {
          const double lo = std::min(c1.genes[i], c2.genes[i]);
          const double hi = std::max(c1.genes[i], c2.genes[i]);
          const double ext = cfg.blend_alpha * (hi - lo);
          c1.genes[i] = lo - ext + unit(rng) * (hi - lo + 2.0 * ext);
          c2.genes[i] = lo - ext + unit(rng) * (hi - lo + 2.0 * ext);
        }
      }
      for (auto* c : {&c1, &c2}) {
        for (std::size_t i = 0; i < d; ++i) {
          const auto& b = space.bounds[i];
          c->genes[i] += scale * (b.upper - b.lower) * normal(rng);
        }
        clamp_genes(c->genes);
      }
      next.push_back(std::move(c1));
      if (next.size() < pop_size) next.push_back(std::move(c2));
    }
    pop = std::move(next);
    evaluate(pop);
    std::stable_sort(pop.begin(), pop.end(), by_cost);
    result.best_cost_history.push_back(pop.front().cost);
  }

  result.generations_run = result.best_cost_history.size();
  result.theta_star = pop.front().genes;
  result.best_cost = pop.front().cost;
  return result;
}

CostEvaluation evaluate_cost(std::span<const double> theta, const CostOptions& opt) {
  const DriveSpec drive = make_drive(opt.kind, theta);
  if (opt.cycles < 1) throw ValidationError("cost: cycles must be >= 1");
  auto icfg = IntegratorConfig::defaults_for(drive, opt.params.kappa);
  if (opt.rel_tol) icfg.rel_tol = *opt.rel_tol;
  if (opt.abs_tol) icfg.abs_tol = *opt.abs_tol;
  const double T = period(drive);
  const double horizon = static_cast<double>(opt.skip_cycles + opt.cycles) * T;

  CostEvaluation out;
  try {
    const auto traj = integrate(opt.params, drive, MeanFieldState{}, horizon, icfg);
    AnalysisOptions aopt;
    aopt.output = opt.output;
    aopt.skip_cycles = opt.skip_cycles;
    aopt.include_open_cycles = opt.include_open_cycles;
    const auto summary = analyze(traj, aopt);
    for (const auto& c : summary.cycles) {
      out.form_factors.push_back(c.form_factor);
      out.closed.push_back(c.closed ? 1 : 0);
    }
    out.cost = -summary.mean_form_factor;
  } catch (const NumericalError& e) {
    out.failed = true;
    out.failure = e.what();
    out.cost = 0.0;
    return out;
  }

  if (opt.kind == DriveKind::sinusoidal) {
    for (std::size_t i = 0; i < out.form_factors.size(); ++i) {
      if (out.form_factors[i] > kPinchedCeiling) {
        std::ostringstream msg;
        msg << "sinusoidal drive: cycle " << i + 1 << " form factor " << out.form_factors[i]
            << " exceeds the pinched-loop ceiling 0.5";
        warn(msg.str());
      }
    }
  }
  return out;
}

OptResult optimize_drive(const SearchSpace& space, const CostOptions& opt, const GaConfig& cfg) {
  CostOptions copt = opt;
  copt.cycles = cfg.cycles;
  auto result = ga_optimize(space, [&copt](std::span<const double> theta) { return cost(theta, copt); }, cfg);
  result.cycle_form_factors = evaluate_cost(result.theta_star, copt).form_factors;
  return result;
}

}  // namespace omem
