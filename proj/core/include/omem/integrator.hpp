#pragma once

#include <cstddef>
#include <functional>

#include "omem/drives.hpp"
#include "omem/model.hpp"
#include "omem/trajectory.hpp"

namespace omem {

/// Tolerances and sampling for the adaptive Dormand-Prince 5(4) integrator.
struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-6;
  double max_step = 0.05;
  double sample_dt = 0.005;
  std::size_t max_steps = 20'000'000;  ///< attempted steps before IntegrationError

  /// rel_tol 1e-9, abs_tol 1e-6 max(1, e0/kappa), max_step min(sigma/5, T/200)
  /// (T/200 for unpulsed drives), sample_dt T/2000.
  static IntegratorConfig defaults_for(const DriveSpec& drive, double kappa = 1.0);

  void validate() const;
};

/// Vector field with the drive amplitude already evaluated: f(state, E(t)).
using VectorField = std::function<StateDerivative(const MeanFieldState&, double)>;

/// Integrates the mean-field equations on [0, horizon] and samples the
/// solution every cfg.sample_dt using the pair's continuous extension.
///
/// Throws ValidationError for a horizon shorter than one drive period or an
/// invalid config, IntegrationError on step-size underflow or a non-finite
/// state.
Trajectory integrate(const OmParams& params, const DriveSpec& drive, const MeanFieldState& init,
                     double horizon, const IntegratorConfig& cfg);

/// Same engine with a caller-supplied vector field (used for verification
/// against perturbed or closed-form models).
Trajectory integrate(const VectorField& field, const DriveSpec& drive, const MeanFieldState& init,
                     double horizon, const IntegratorConfig& cfg);

struct IntegralDeviation {
  double photon = 0.0;  ///< max |quadrature - n_photon| / max n_photon
  double phonon = 0.0;  ///< same for the phonon number
};

/// Recomputes the photon and phonon numbers from their causal
/// exponential-kernel integrals (resonant drive only),
///
///   n_c(t) = sqrt(2)     int_0^t E(s) X_c(s)     exp(-2 kappa   (t - s)) ds
///   n_m(t) = sqrt(2) g_m int_0^t n_c(s) P_m(s)   exp(-2 gamma_m (t - s)) ds
///
/// with the trapezoidal rule on the sample grid, via the O(N) recurrence
/// I(t + dt) = I(t) e^{-G dt} + trapezoid slice. Throws ValidationError if
/// params.delta != 0.
IntegralDeviation integral_representation_check(const Trajectory& traj, const OmParams& params);

}  // namespace omem
