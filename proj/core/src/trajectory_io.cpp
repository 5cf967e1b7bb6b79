#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "omem/errors.hpp"
#include "omem/trajectory.hpp"

namespace omem {
namespace {

constexpr std::string_view kHeader = "t,E,Xc,Pc,Xm,Pm,n_photon,n_phonon";
constexpr std::size_t kColumns = 8;

void put(std::ostream& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.write(buf, len);
}

double parse_field(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("trajectory csv: line " + std::to_string(line_no) + ": bad number '" +
                          std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> Trajectory::photon_series() const {
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = photon_number(states[i]);
  return out;
}

std::vector<double> Trajectory::phonon_series() const {
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = phonon_number(states[i]);
  return out;
}

void Trajectory::validate() const {
  const std::size_t n = times.size();
  if (n < 2) throw ValidationError("trajectory: needs at least two samples");
  if (drive.size() != n || states.size() != n) {
    throw ValidationError("trajectory: series lengths differ");
  }
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ValidationError("trajectory: times must increase");
  for (std::size_t i = 1; i < n; ++i) {
    const double step = times[i] - times[i - 1];
    // 1e-12 relative to the step, with slack for the rounding of i * dt itself.
    const double slack = 1e-12 * dt + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(times[i]);
    if (std::abs(step - dt) > slack) throw ValidationError("trajectory: time grid is not uniform");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!states[i].finite() || !std::isfinite(drive[i])) {
      throw ValidationError("trajectory: non-finite value at sample " + std::to_string(i));
    }
  }
  if (!(period > 0.0)) throw ValidationError("trajectory: period must be > 0");
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    const std::array<double, kColumns> row{traj.times[i], traj.drive[i], s.x_c, s.p_c,
                                           s.x_m, s.p_m, traj.n_photon(i), traj.n_phonon(i)};
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (c > 0) out << ',';
      put(out, row[c]);
    }
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_trajectory_csv(out, traj);
  if (!out) throw Error("failed writing " + path.string());
}

Trajectory read_trajectory_csv(std::istream& in, double period) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw ValidationError("trajectory csv: header must be '" + std::string(kHeader) + "', got '" +
                          line + "'");
  }
  Trajectory traj;
  traj.period = period;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, kColumns> row{};
    std::size_t col = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      if (col == kColumns) {
        throw ValidationError("trajectory csv: line " + std::to_string(line_no) + ": too many columns");
      }
      row[col++] = parse_field(rest.substr(0, comma), line_no);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (col != kColumns) {
      throw ValidationError("trajectory csv: line " + std::to_string(line_no) + ": expected 8 columns");
    }
    const MeanFieldState s{row[2], row[3], row[4], row[5]};
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    if (!close(row[6], photon_number(s)) || !close(row[7], phonon_number(s))) {
      throw ValidationError("trajectory csv: line " + std::to_string(line_no) +
                            ": derived columns disagree with the state");
    }
    traj.times.push_back(row[0]);
    traj.drive.push_back(row[1]);
    traj.states.push_back(s);
  }
  traj.validate();
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, double period) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory " + path.string());
  return read_trajectory_csv(in, period);
}

}  // namespace omem
