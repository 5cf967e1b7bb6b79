#include "omem/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "omem/errors.hpp"
#include "omem/log.hpp"

namespace omem {
namespace {

using Vec4 = std::array<double, 4>;

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step-size controller (PI, Hairer & Wanner).
constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;  // hnew >= 0.2 h
constexpr double kMaxGrow = 10.0;   // hnew <= 10 h
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;

template <class F>
Vec4 eval(F& field, const DriveSpec& drive, double t, const Vec4& y) {
  return field(MeanFieldState::from_array(y), evaluate(drive, t)).to_array();
}

template <class... Terms>
Vec4 axpy(const Vec4& y, double h, const std::pair<double, const Vec4*>& first, const Terms&... rest) {
  Vec4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = first.first * (*first.second)[i];
    ((acc += rest.first * (*rest.second)[i]), ...);
    out[i] = y[i] + h * acc;
  }
  return out;
}

struct Tolerance {
  double rel, abs;
  double scale(double a, double b) const { return abs + rel * std::max(std::abs(a), std::abs(b)); }
};

double initial_step(const Vec4& y0, const Vec4& f0, double t0, const Tolerance& tol, double max_step,
                    auto&& field_at) {
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double sk = tol.scale(y0[i], 0.0);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, max_step);
  Vec4 y1;
  for (std::size_t i = 0; i < 4; ++i) y1[i] = y0[i] + h * f0[i];
  const Vec4 f1 = field_at(t0 + h, y1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double sk = tol.scale(y0[i], 0.0);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der = std::max(std::sqrt(dnf), der2);
  const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
  return std::min({100.0 * h, h1, max_step});
}

template <class F>
Trajectory run(F& field, const DriveSpec& drive, const MeanFieldState& init, double horizon,
               const IntegratorConfig& cfg) {
  drive.validate();
  cfg.validate();
  const double T = period(drive);
  if (!(horizon >= T * (1.0 - 1e-12))) {
    throw ValidationError("integrate: horizon must cover at least one drive period");
  }
  if (!init.finite()) throw ValidationError("integrate: initial state is not finite");

  const double dt = cfg.sample_dt;
  const auto n_samples = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9)) + 1;
  const double t_end = static_cast<double>(n_samples - 1) * dt;

  Trajectory traj;
  traj.period = T;
  traj.times.resize(n_samples);
  traj.drive.resize(n_samples);
  traj.states.resize(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    traj.times[k] = static_cast<double>(k) * dt;
    traj.drive[k] = evaluate(drive, traj.times[k]);
  }
  traj.states[0] = init;

  const Tolerance tol{cfg.rel_tol, cfg.abs_tol};
  auto field_at = [&](double t, const Vec4& y) { return eval(field, drive, t, y); };

  double t = 0.0;
  Vec4 y = init.to_array();
  Vec4 k1 = field_at(t, y);
  double h = initial_step(y, k1, t, tol, cfg.max_step, field_at);
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t next = 1;
  std::size_t attempts = 0;

  while (next < n_samples) {
    if (++attempts > cfg.max_steps) throw IntegrationError("integrate: step budget exhausted", t);
    const double remaining = t_end - t;
    const bool final_step = h >= remaining;
    if (final_step) h = remaining;
    if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("integrate: step size underflow", t);
    }

    const Vec4 y2 = axpy(y, h, {a21, &k1});
    const Vec4 k2 = field_at(t + c2 * h, y2);
    const Vec4 y3 = axpy(y, h, {a31, &k1}, std::pair{a32, &k2});
    const Vec4 k3 = field_at(t + c3 * h, y3);
    const Vec4 y4 = axpy(y, h, {a41, &k1}, std::pair{a42, &k2}, std::pair{a43, &k3});
    const Vec4 k4 = field_at(t + c4 * h, y4);
    const Vec4 y5 = axpy(y, h, {a51, &k1}, std::pair{a52, &k2}, std::pair{a53, &k3},
                         std::pair{a54, &k4});
    const Vec4 k5 = field_at(t + c5 * h, y5);
    const Vec4 y6 = axpy(y, h, {a61, &k1}, std::pair{a62, &k2}, std::pair{a63, &k3},
                         std::pair{a64, &k4}, std::pair{a65, &k5});
    const double t_new = final_step ? t_end : t + h;
    const Vec4 k6 = field_at(t_new, y6);
    const Vec4 y_new = axpy(y, h, {a71, &k1}, std::pair{a73, &k3}, std::pair{a74, &k4},
                            std::pair{a75, &k5}, std::pair{a76, &k6});
    const Vec4 k7 = field_at(t_new, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = e / tol.scale(y[i], y_new[i]);
      err += r * r;
    }
    err = std::sqrt(err / 4.0);

    if (!std::isfinite(err)) {
      h *= kMinShrink;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      bool state_finite = true;
      for (double v : y_new) state_finite = state_finite && std::isfinite(v);
      if (!state_finite) throw IntegrationError("integrate: non-finite state", t_new);

      // Continuous extension on [t, t_new].
      if (next < n_samples && traj.times[next] <= t_new) {
        Vec4 r2, r3, r4, r5;
        for (std::size_t i = 0; i < 4; ++i) {
          const double ydiff = y_new[i] - y[i];
          const double bspl = h * k1[i] - ydiff;
          r2[i] = ydiff;
          r3[i] = bspl;
          r4[i] = ydiff - h * k7[i] - bspl;
          r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        while (next < n_samples && traj.times[next] <= t_new) {
          const double th = std::clamp((traj.times[next] - t) / h, 0.0, 1.0);
          const double th1 = 1.0 - th;
          Vec4 v;
          for (std::size_t i = 0; i < 4; ++i) {
            v[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
          }
          traj.states[next] = MeanFieldState::from_array(v);
          ++next;
        }
      }

      double fac = fac11 / std::pow(err_old, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);
      last_rejected = false;

      t = t_new;
      y = y_new;
      k1 = k7;
      h = std::min(h_new, cfg.max_step);
    } else {
      h /= std::min(1.0 / kMinShrink, fac11 / kSafety);
      last_rejected = true;
    }
  }
  return traj;
}

}  // namespace

IntegratorConfig IntegratorConfig::defaults_for(const DriveSpec& drive, double kappa) {
  const double T = period(drive);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-6 * std::max(1.0, drive.e0 / kappa);
  cfg.max_step = T / 200.0;
  if (auto w = feature_width(drive)) cfg.max_step = std::min(*w / 5.0, cfg.max_step);
  cfg.sample_dt = T / 2000.0;
  return cfg;
}

void IntegratorConfig::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!(ok(rel_tol) && rel_tol < 1.0)) throw ValidationError("integrator: rel_tol must be in (0, 1)");
  if (!ok(abs_tol)) throw ValidationError("integrator: abs_tol must be > 0");
  if (!ok(max_step)) throw ValidationError("integrator: max_step must be > 0");
  if (!ok(sample_dt)) throw ValidationError("integrator: sample_dt must be > 0");
  if (max_steps == 0) throw ValidationError("integrator: max_steps must be > 0");
}

Trajectory integrate(const OmParams& params, const DriveSpec& drive, const MeanFieldState& init,
                     double horizon, const IntegratorConfig& cfg) {
  params.validate();
  for (const auto& note : params.diagnostics()) warn(note);
  auto field = [&params](const MeanFieldState& s, double e) { return rhs(s, params, e); };
  return run(field, drive, init, horizon, cfg);
}

Trajectory integrate(const VectorField& field, const DriveSpec& drive, const MeanFieldState& init,
                     double horizon, const IntegratorConfig& cfg) {
  if (!field) throw ValidationError("integrate: empty vector field");
  return run(field, drive, init, horizon, cfg);
}

IntegralDeviation integral_representation_check(const Trajectory& traj, const OmParams& params) {
  traj.validate();
  if (params.delta != 0.0) {
    throw ValidationError("integral_representation_check: requires resonant drive (delta = 0)");
  }
  const std::size_t n = traj.size();
  const double dt = traj.sample_dt();
  const double decay_c = std::exp(-2.0 * params.kappa * dt);
  const double decay_m = std::exp(-2.0 * derive_gamma_m(params) * dt);
  constexpr double sqrt2 = std::numbers::sqrt2;

  auto photon_source = [&](std::size_t i) { return sqrt2 * traj.drive[i] * traj.states[i].x_c; };
  auto phonon_source = [&](std::size_t i) {
    return sqrt2 * params.g_m * traj.n_photon(i) * traj.states[i].p_m;
  };

  // Both integrals start from vacuum at t = 0, so compare against the
  // observables shifted by their initial values.
  const double nc0 = traj.n_photon(0);
  const double nm0 = traj.n_phonon(0);
  double ic = 0.0, im = 0.0;
  double max_c = std::abs(nc0), max_m = std::abs(nm0);
  double dev_c = 0.0, dev_m = 0.0;
  double free_c = nc0, free_m = nm0;
  for (std::size_t i = 1; i < n; ++i) {
    ic = ic * decay_c + 0.5 * dt * (photon_source(i - 1) * decay_c + photon_source(i));
    im = im * decay_m + 0.5 * dt * (phonon_source(i - 1) * decay_m + phonon_source(i));
    const double nc = traj.n_photon(i);
    const double nm = traj.n_phonon(i);
    max_c = std::max(max_c, std::abs(nc));
    max_m = std::max(max_m, std::abs(nm));
    free_c *= decay_c;
    free_m *= decay_m;
    dev_c = std::max(dev_c, std::abs(ic + free_c - nc));
    dev_m = std::max(dev_m, std::abs(im + free_m - nm));
  }
  return {max_c > 0.0 ? dev_c / max_c : 0.0, max_m > 0.0 ? dev_m / max_m : 0.0};
}

}  // namespace omem
