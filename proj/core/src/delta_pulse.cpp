#include "omem/delta_pulse.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "omem/analysis.hpp"
#include "omem/drives.hpp"
#include "omem/errors.hpp"
#include "omem/integrator.hpp"

namespace omem {

double analytic_delta_area(double kappa, double omega_c, double e0, double t_s) noexcept {
  return 2.0 * std::numbers::sqrt2 * kappa * omega_c * e0 * e0 * e0 * std::exp(-2.0 * kappa * t_s);
}

DeltaPulseReport verify_delta_pulse(const OmParams& params, double e0, double t_s) {
  if (params.g_m != 0.0) throw ValidationError("verify_delta_pulse: requires g_m = 0");
  if (!(e0 > 0.0) || !(t_s > 0.0)) throw ValidationError("verify_delta_pulse: e0 and t_s must be > 0");
  if (!(params.kappa >= 0.0)) throw ValidationError("verify_delta_pulse: kappa must be >= 0");

  DeltaPulseReport report;
  report.analytic_area = analytic_delta_area(params.kappa, params.omega_c, e0, t_s);
  report.closed = 4.0 * params.kappa * t_s >= 10.0;
  if (!report.closed) {
    report.warnings.push_back("loop does not close: 4 kappa t_s = " +
                              std::to_string(4.0 * params.kappa * t_s) + " is not >> 1");
  }

  // The bare cavity; params.validate() is bypassed so kappa = 0 can be probed.
  auto field = [&params](const MeanFieldState& s, double e) { return rhs(s, params, e); };

  for (double divisor : {50.0, 100.0, 200.0}) {
    const double sigma = t_s / divisor;
    const auto drive = DriveSpec::delta_pulse(e0, t_s, sigma);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-12 * std::max(1.0, e0);
    cfg.max_step = sigma / 5.0;
    cfg.sample_dt = sigma / 40.0;
    const auto traj = integrate(field, drive, MeanFieldState{}, 2.0 * t_s, cfg);

    std::vector<Point2> loop;
    loop.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      loop.push_back({traj.drive[i], params.omega_c * traj.n_photon(i)});
    }
    report.sigmas.push_back(sigma);
    report.areas.push_back(loop_area(loop));
  }

  const double a1 = report.areas[0], a2 = report.areas[1], a3 = report.areas[2];
  const double ratio = (a1 - a2) / (a2 - a3);
  report.estimated_order = std::log2(ratio);
  report.converged = std::isfinite(report.estimated_order) && report.estimated_order > 0.0;
  if (report.converged) {
    report.numeric_area = a3 + (a3 - a2) / (std::pow(2.0, report.estimated_order) - 1.0);
  } else if (a1 == a2 && a2 == a3) {
    report.converged = true;
    report.numeric_area = a3;
  } else {
    report.numeric_area = a3;
    report.warnings.push_back("loop area does not converge as sigma -> 0 (estimated order " +
                              std::to_string(report.estimated_order) + ")");
  }

  if (report.analytic_area != 0.0) {
    report.relative_error = std::abs(report.numeric_area - report.analytic_area) / report.analytic_area;
  } else {
    report.relative_error = report.numeric_area == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace omem
