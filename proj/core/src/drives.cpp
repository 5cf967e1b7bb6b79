#include "omem/drives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "omem/errors.hpp"

namespace omem {
namespace {

constexpr double kGaussianCutoff = 8.0;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("drive: " + message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

double gaussian_train_value(const DriveSpec& s, double t) noexcept {
  const double reach = kGaussianCutoff * s.sigma;
  auto first = static_cast<long long>(std::ceil((t - reach) / s.t_s));
  const auto last = static_cast<long long>(std::floor((t + reach) / s.t_s));
  first = std::max(first, 1LL);
  if (first % 2 == 0) ++first;
  const double inv_two_var = 1.0 / (2.0 * s.sigma * s.sigma);
  double sum = 0.0;
  for (long long n = first; n <= last; n += 2) {
    const double d = t - static_cast<double>(n) * s.t_s;
    sum += std::exp(-d * d * inv_two_var);
  }
  return s.e0 * sum;
}

double tabulated_value(const DriveSpec& s, double t) noexcept {
  const auto& pts = s.samples;
  if (pts.empty()) return 0.0;
  if (s.declared_period && t > pts.back().t) {
    const double p = *s.declared_period;
    t = pts.front().t + std::fmod(t - pts.front().t, p);
  }
  if (t <= pts.front().t) return pts.front().value;
  if (t >= pts.back().t) return pts.back().value;
  auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double v, const DriveSample& p) { return v < p.t; });
  auto lo = hi - 1;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return lo->value + w * (hi->value - lo->value);
}

}  // namespace

std::string_view to_string(DriveKind kind) noexcept {
  switch (kind) {
    case DriveKind::gaussian_train: return "gaussian_train";
    case DriveKind::sinusoidal: return "sinusoidal";
    case DriveKind::square_sinusoidal: return "square_sinusoidal";
    case DriveKind::delta_pulse: return "delta_pulse";
    case DriveKind::tabulated: return "tabulated";
  }
  return "unknown";
}

std::optional<DriveKind> parse_drive_kind(std::string_view name) noexcept {
  for (auto k : {DriveKind::gaussian_train, DriveKind::sinusoidal, DriveKind::square_sinusoidal,
                 DriveKind::delta_pulse, DriveKind::tabulated}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

DriveSpec DriveSpec::gaussian_train(double e0, double t_s, double sigma) {
  DriveSpec s;
  s.kind = DriveKind::gaussian_train;
  s.e0 = e0;
  s.t_s = t_s;
  s.sigma = sigma;
  return s;
}

DriveSpec DriveSpec::sinusoidal(double e0, double omega) {
  DriveSpec s;
  s.kind = DriveKind::sinusoidal;
  s.e0 = e0;
  s.omega = omega;
  return s;
}

DriveSpec DriveSpec::square_sinusoidal(double e0, double omega) {
  DriveSpec s = sinusoidal(e0, omega);
  s.kind = DriveKind::square_sinusoidal;
  return s;
}

DriveSpec DriveSpec::delta_pulse(double e0, double t_s, std::optional<double> sigma) {
  DriveSpec s;
  s.kind = DriveKind::delta_pulse;
  s.e0 = e0;
  s.t_s = t_s;
  s.sigma = sigma.value_or(t_s / 200.0);
  return s;
}

DriveSpec DriveSpec::tabulated(std::vector<DriveSample> samples, std::optional<double> period) {
  DriveSpec s;
  s.kind = DriveKind::tabulated;
  s.samples = std::move(samples);
  s.declared_period = period;
  return s;
}

void DriveSpec::validate() const {
  switch (kind) {
    case DriveKind::gaussian_train:
    case DriveKind::delta_pulse:
      require(std::isfinite(e0) && e0 >= 0.0, "e0 must be finite and >= 0");
      require(positive(t_s), "t_s must be > 0");
      require(positive(sigma), "sigma must be > 0");
      break;
    case DriveKind::sinusoidal:
    case DriveKind::square_sinusoidal:
      require(std::isfinite(e0) && e0 >= 0.0, "e0 must be finite and >= 0");
      require(positive(omega), "omega must be > 0");
      break;
    case DriveKind::tabulated:
      require(samples.size() >= 2, "tabulated drive needs at least two samples");
      for (std::size_t i = 0; i < samples.size(); ++i) {
        require(std::isfinite(samples[i].t) && std::isfinite(samples[i].value),
                "tabulated samples must be finite");
        if (i > 0) require(samples[i].t > samples[i - 1].t, "tabulated times must increase");
      }
      if (declared_period) require(positive(*declared_period), "declared period must be > 0");
      break;
  }
}

double evaluate(const DriveSpec& spec, double t) noexcept {
  switch (spec.kind) {
    case DriveKind::gaussian_train:
      return gaussian_train_value(spec, t);
    case DriveKind::sinusoidal:
      return spec.e0 * std::sin(spec.omega * t);
    case DriveKind::square_sinusoidal: {
      const double s = std::sin(spec.omega * t);
      return spec.e0 * s * s;
    }
    case DriveKind::delta_pulse: {
      const double d = (t - spec.t_s) / spec.sigma;
      if (std::abs(d) > kGaussianCutoff) return 0.0;
      return spec.e0 * std::exp(-0.5 * d * d) / (spec.sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    case DriveKind::tabulated:
      return tabulated_value(spec, t);
  }
  return 0.0;
}

double period(const DriveSpec& spec) {
  switch (spec.kind) {
    case DriveKind::gaussian_train:
    case DriveKind::delta_pulse:
      return 2.0 * spec.t_s;
    case DriveKind::sinusoidal:
      return 2.0 * std::numbers::pi / spec.omega;
    case DriveKind::square_sinusoidal:
      return std::numbers::pi / spec.omega;
    case DriveKind::tabulated:
      if (!spec.declared_period) throw ValidationError("drive: tabulated drive has no declared period");
      return *spec.declared_period;
  }
  throw ValidationError("drive: unknown kind");
}

std::optional<double> feature_width(const DriveSpec& spec) noexcept {
  if (spec.kind == DriveKind::gaussian_train || spec.kind == DriveKind::delta_pulse) return spec.sigma;
  return std::nullopt;
}

}  // namespace omem
