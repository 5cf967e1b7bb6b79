#include "omem/model.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "omem/errors.hpp"
#include "omem/trajectory.hpp"

namespace omem {

void OmParams::validate() const {
  auto fail = [](const char* what) { throw ValidationError(std::string("params: ") + what); };
  for (double v : {delta, omega_m, g_m, kappa, quality, omega_c}) {
    if (!std::isfinite(v)) fail("all fields must be finite");
  }
  if (kappa <= 0.0) fail("kappa must be > 0");
  if (omega_m <= 0.0) fail("omega_m must be > 0");
  if (quality <= 0.0) fail("quality must be > 0");
  if (g_m < 0.0) fail("g_m must be >= 0");
}

std::vector<std::string> OmParams::diagnostics() const {
  std::vector<std::string> out;
  if (quality > 0.0 && derive_gamma_m(*this) > 0.1 * kappa) {
    std::ostringstream msg;
    msg << "gamma_m = " << derive_gamma_m(*this) << " is not small compared to kappa = " << kappa;
    out.push_back(msg.str());
  }
  return out;
}

double derive_gamma_m(const OmParams& params) { return params.omega_m / params.quality; }

StateDerivative rhs(const MeanFieldState& s, const OmParams& p, double e_t) noexcept {
  constexpr double sqrt2 = std::numbers::sqrt2;
  const double gamma_m = p.omega_m / p.quality;
  const double n2 = s.x_c * s.x_c + s.p_c * s.p_c;
  return {
      -p.kappa * s.x_c + p.delta * s.p_c - sqrt2 * p.g_m * s.x_m * s.p_c + sqrt2 * e_t,
      -p.kappa * s.p_c - p.delta * s.x_c + sqrt2 * p.g_m * s.x_m * s.x_c,
      -gamma_m * s.x_m + p.omega_m * s.p_m,
      -gamma_m * s.p_m - p.omega_m * s.x_m + p.g_m / sqrt2 * n2,
  };
}

OscillatorResidual oscillator_residual(const Trajectory& traj, const OmParams& params) {
  const std::size_t n = traj.size();
  if (n < 5) throw ValidationError("oscillator_residual: need at least 5 samples");
  const double h = traj.sample_dt();
  const double gamma = derive_gamma_m(params);
  const double omega0_sq = params.omega_m * params.omega_m + gamma * gamma;
  const double force_scale = std::numbers::sqrt2 * params.g_m * params.omega_m;

  auto xm = [&](std::size_t i) { return traj.states[i].x_m; };

  OscillatorResidual out;
  out.times.reserve(n - 4);
  out.residual.reserve(n - 4);
  // Squared norms of the four terms, to scale the residual.
  std::array<double, 4> term_sq{};
  double res_sq = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d1 = (xm(i - 2) - 8.0 * xm(i - 1) + 8.0 * xm(i + 1) - xm(i + 2)) / (12.0 * h);
    const double d2 =
        (-xm(i - 2) + 16.0 * xm(i - 1) - 30.0 * xm(i) + 16.0 * xm(i + 1) - xm(i + 2)) / (12.0 * h * h);
    const std::array<double, 4> terms{d2, 2.0 * gamma * d1, omega0_sq * xm(i),
                                      -force_scale * traj.n_photon(i)};
    const double r = terms[0] + terms[1] + terms[2] + terms[3];
    for (std::size_t k = 0; k < 4; ++k) term_sq[k] += terms[k] * terms[k];
    res_sq += r * r;
    out.times.push_back(traj.times[i]);
    out.residual.push_back(r);
  }
  const double scale_sq = *std::max_element(term_sq.begin(), term_sq.end());
  out.relative_norm = scale_sq > 0.0 ? std::sqrt(res_sq / scale_sq) : 0.0;
  return out;
}

}  // namespace omem
