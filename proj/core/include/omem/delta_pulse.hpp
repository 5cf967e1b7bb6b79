#pragma once

#include <string>
#include <vector>

#include "omem/model.hpp"

namespace omem {

/// Closed-form loop area of a delta kick for the bare cavity, with the
/// cavity energy omega_c n_photon as output:
///   A = 2 sqrt(2) kappa omega_c e0^3 exp(-2 kappa t_s)
/// Zero when kappa = 0.
double analytic_delta_area(double kappa, double omega_c, double e0, double t_s) noexcept;

struct DeltaPulseReport {
  std::vector<double> sigmas;  ///< regularization widths, coarse to fine
  std::vector<double> areas;   ///< unnormalized (E, omega_c n_photon) loop area per width
  double estimated_order = 0.0;  ///< p in A(sigma) ~ A0 + C sigma^p
  bool converged = false;        ///< p > 0, so the sigma -> 0 limit exists
  double numeric_area = 0.0;     ///< extrapolated limit, or the finest area if not converged
  double analytic_area = 0.0;
  double relative_error = 0.0;   ///< |numeric - analytic| / analytic (inf if analytic == 0 != numeric)
  bool closed = true;            ///< 4 kappa t_s >= 10
  std::vector<std::string> warnings;
};

/// Simulates the regularized kick with sigma = t_s/50, t_s/100, t_s/200 on
/// [0, 2 t_s], measures the unnormalized loop area against the cavity energy,
/// extrapolates to sigma -> 0 with an estimated order and compares with
/// analytic_delta_area. kappa = 0 is accepted here (the loop then never
/// closes). Throws ValidationError unless g_m == 0, e0 > 0 and t_s > 0.
DeltaPulseReport verify_delta_pulse(const OmParams& params, double e0, double t_s);

}  // namespace omem
