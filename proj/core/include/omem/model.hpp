#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace omem {

struct Trajectory;

/// Physical constants of the driven cavity + mechanical oscillator.
///
/// Everything is expressed in units of the cavity damping rate: rates and
/// frequencies in kappa, times in 1/kappa. The mechanical damping is not
/// stored; it follows from the quality factor (see derive_gamma_m).
struct OmParams {
  double delta = 0.0;     ///< detuning omega_c - omega_L
  double omega_m = 20.0;  ///< mechanical frequency
  double g_m = 1e-5;      ///< optomechanical coupling
  double kappa = 1.0;     ///< cavity damping
  double quality = 1e4;   ///< mechanical quality factor Q
  double omega_c = 20.0;  ///< cavity frequency; only scales the cavity energy observable

  /// Throws ValidationError on kappa <= 0, omega_m <= 0, quality <= 0, g_m < 0
  /// or non-finite fields.
  void validate() const;

  /// Soft diagnostics (currently: gamma_m not small compared to kappa).
  std::vector<std::string> diagnostics() const;
};

/// Mean values of the four dimensionless quadratures.
struct MeanFieldState {
  double x_c = 0.0;
  double p_c = 0.0;
  double x_m = 0.0;
  double p_m = 0.0;

  bool finite() const noexcept {
    return std::isfinite(x_c) && std::isfinite(p_c) && std::isfinite(x_m) && std::isfinite(p_m);
  }

  std::array<double, 4> to_array() const noexcept { return {x_c, p_c, x_m, p_m}; }
  static MeanFieldState from_array(const std::array<double, 4>& v) noexcept {
    return {v[0], v[1], v[2], v[3]};
  }

  friend bool operator==(const MeanFieldState&, const MeanFieldState&) = default;
};

/// Time derivative of a MeanFieldState; same layout.
using StateDerivative = MeanFieldState;

/// Mechanical damping rate omega_m / Q.
double derive_gamma_m(const OmParams& params);

/// Mean-field equations of motion for drive amplitude `e_t`, detuning included.
StateDerivative rhs(const MeanFieldState& state, const OmParams& params, double e_t) noexcept;

/// Mean photon number (X_c^2 + P_c^2) / 2.
inline double photon_number(const MeanFieldState& s) noexcept {
  return 0.5 * (s.x_c * s.x_c + s.p_c * s.p_c);
}

/// Mean phonon number (X_m^2 + P_m^2) / 2.
inline double phonon_number(const MeanFieldState& s) noexcept {
  return 0.5 * (s.x_m * s.x_m + s.p_m * s.p_m);
}

struct OscillatorResidual {
  std::vector<double> times;     ///< interior sample times where the stencil fits
  std::vector<double> residual;  ///< pointwise residual of the oscillator identity
  double relative_norm = 0.0;    ///< ||residual|| / max term norm; 0 if all terms vanish
};

/// Checks the mechanical displacement against the forced damped oscillator
///
///   X_m'' + 2 gamma_m X_m' + (omega_m^2 + gamma_m^2) X_m = sqrt(2) g_m omega_m n_photon
///
/// using fourth-order central differences on the uniform sample grid.
/// Throws ValidationError with fewer than five samples.
OscillatorResidual oscillator_residual(const Trajectory& traj, const OmParams& params);

}  // namespace omem
