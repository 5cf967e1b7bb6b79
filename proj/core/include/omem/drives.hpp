#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace omem {

enum class DriveKind { gaussian_train, sinusoidal, square_sinusoidal, delta_pulse, tabulated };

std::string_view to_string(DriveKind kind) noexcept;
std::optional<DriveKind> parse_drive_kind(std::string_view name) noexcept;

struct DriveSample {
  double t = 0.0;
  double value = 0.0;
};

/// Periodic control field E(t) applied to the cavity.
///
/// Which fields matter depends on `kind`:
///   gaussian_train     e0, t_s, sigma   pulses at odd multiples of t_s, period 2 t_s
///   sinusoidal         e0, omega        e0 sin(omega t), period 2 pi / omega
///   square_sinusoidal  e0, omega        e0 sin^2(omega t), period pi / omega
///   delta_pulse        e0, t_s, sigma   unit-area Gaussian of width sigma scaled by e0
///                                       and centred at t_s; period 2 t_s
///   tabulated          samples, declared_period
struct DriveSpec {
  DriveKind kind = DriveKind::sinusoidal;
  double e0 = 0.0;
  double t_s = 0.0;
  double sigma = 0.0;
  double omega = 0.0;
  std::vector<DriveSample> samples;
  std::optional<double> declared_period;

  static DriveSpec gaussian_train(double e0, double t_s, double sigma);
  static DriveSpec sinusoidal(double e0, double omega);
  static DriveSpec square_sinusoidal(double e0, double omega);
  /// Default width t_s / 200.
  static DriveSpec delta_pulse(double e0, double t_s, std::optional<double> sigma = std::nullopt);
  static DriveSpec tabulated(std::vector<DriveSample> samples, std::optional<double> period);

  /// Throws ValidationError if the fields used by `kind` are out of range.
  void validate() const;
};

/// E(t). Gaussian trains keep only pulses within 8 sigma of t; tabulated
/// drives interpolate linearly and repeat with the declared period (if any),
/// holding the end values otherwise.
double evaluate(const DriveSpec& spec, double t) noexcept;

/// Fundamental period. Throws ValidationError for a tabulated drive without
/// a declared period.
double period(const DriveSpec& spec);

/// Narrowest feature the integrator must resolve: sigma for pulsed drives,
/// otherwise nullopt.
std::optional<double> feature_width(const DriveSpec& spec) noexcept;

}  // namespace omem
