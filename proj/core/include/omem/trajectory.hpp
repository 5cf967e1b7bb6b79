#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "omem/model.hpp"

namespace omem {

/// Uniformly sampled solution of the mean-field equations.
///
/// `times[i] = i * dt` exactly; photon and phonon numbers are always derived
/// from `states` on access and never stored.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> drive;
  std::vector<MeanFieldState> states;
  double period = 0.0;  ///< drive period used to cut the series into cycles

  std::size_t size() const noexcept { return times.size(); }
  double sample_dt() const noexcept { return times.size() > 1 ? times[1] - times[0] : 0.0; }

  double n_photon(std::size_t i) const noexcept { return photon_number(states[i]); }
  double n_phonon(std::size_t i) const noexcept { return phonon_number(states[i]); }
  std::vector<double> photon_series() const;
  std::vector<double> phonon_series() const;

  /// Throws ValidationError unless all series share one length >= 2, the time
  /// grid is uniform to 1e-12 relative, and every state is finite.
  void validate() const;
};

/// Writes `t,E,Xc,Pc,Xm,Pm,n_photon,n_phonon` with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Parses the CSV produced by write_trajectory_csv. The header must match
/// exactly; derived columns are checked against the state columns.
/// `period` is not part of the file and must be supplied by the caller.
Trajectory read_trajectory_csv(std::istream& in, double period);
Trajectory read_trajectory_csv(const std::filesystem::path& path, double period);

}  // namespace omem
