#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omem/geometry.hpp"
#include "omem/trajectory.hpp"

namespace omem {

/// Output observable paired with the drive to form the input-output loop.
enum class Observable { photon, phonon, x_c, p_c, x_m, p_m };

std::string_view to_string(Observable o) noexcept;
std::optional<Observable> parse_observable(std::string_view name) noexcept;
double observable_value(const MeanFieldState& s, Observable o) noexcept;

/// One drive cycle of the normalized (E(t), y(t)) curve.
struct LoopCurve {
  std::size_t cycle_index = 0;  ///< 1-based
  std::vector<Point2> points;
  bool closed = false;  ///< endpoint gap below kClosureTolerance of the bbox diagonal
};

/// Relative endpoint gap (to the bounding-box diagonal) below which a cycle counts as closed.
inline constexpr double kClosureTolerance = 1e-3;

/// Cuts the trajectory into cycles [(n-1)T, nT] and divides the drive and the
/// output by their maximum magnitudes over all analysed cycles (cycles after
/// `skip_cycles`). Only complete cycles are returned.
///
/// Throws ValidationError if no complete cycle remains or a cycle has fewer
/// than 8 samples, DegenerateSignalError if either signal is identically zero.
std::vector<LoopCurve> normalize(const Trajectory& traj, Observable output, std::size_t skip_cycles = 0);

/// Whether the endpoints of the point sequence are within kClosureTolerance
/// of the bounding-box diagonal.
bool is_closed(std::span<const Point2> pts) noexcept;

/// |oint x dy| of the curve closed by a chord, taken as the mean of both
/// circulation forms. Throws ValidationError for fewer than 3 points and
/// NumericalError if the two forms disagree beyond rounding.
double loop_area(std::span<const Point2> pts);
inline double loop_area(const LoopCurve& c) { return loop_area(c.points); }

/// Area counted lobe by lobe (see lobe_area in geometry.hpp). This is the
/// area entering the form factor, so pinched loops score up to 0.5 instead
/// of cancelling to zero.
double memory_area(std::span<const Point2> pts);
inline double memory_area(const LoopCurve& c) { return memory_area(c.points); }

/// Arc length along the samples plus the chord from the last sample back to
/// the first. Throws ValidationError for fewer than 2 points.
double loop_perimeter(std::span<const Point2> pts);
inline double loop_perimeter(const LoopCurve& c) { return loop_perimeter(c.points); }

/// 4 pi A / P^2 with A = memory_area. Values above 1 (open cycles) are
/// clamped, with a warning when the excess exceeds 1e-6. Throws
/// NumericalError when the perimeter is zero.
double form_factor(std::span<const Point2> pts);
inline double form_factor(const LoopCurve& c) { return form_factor(c.points); }

/// Transverse self-crossings of the closed curve; crossings within 1e-4 merge.
std::size_t count_self_intersections(std::span<const Point2> pts);
inline std::size_t count_self_intersections(const LoopCurve& c) {
  return count_self_intersections(c.points);
}

enum class StoringClass { storing, non_storing, indeterminate };
std::string_view to_string(StoringClass s) noexcept;

struct StoringThresholds {
  double eps_x = 0.02;
  double eps_y = 0.02;
};

/// Energy-storing test: looks at the samples where the input is near zero
/// (|x| < eps_x). Non-storing if the output also comes near zero there
/// (min y < eps_y), storing otherwise, indeterminate if the input never
/// comes near zero.
StoringClass classify_storing(std::span<const Point2> pts, const StoringThresholds& th = {});
inline StoringClass classify_storing(const LoopCurve& c, const StoringThresholds& th = {}) {
  return classify_storing(c.points, th);
}

struct CycleMetrics {
  std::size_t cycle_index = 0;
  double area = 0.0;
  double perimeter = 0.0;
  double form_factor = 0.0;
  std::size_t n_intersections = 0;
  StoringClass storing = StoringClass::indeterminate;
  bool closed = false;
};

CycleMetrics measure_cycle(const LoopCurve& curve, const StoringThresholds& th = {});

struct Plateau {
  double level = 0.0;     ///< median of the window medians in the run
  double t_start = 0.0;   ///< start of the first window
  double t_end = 0.0;     ///< end of the last window
  std::size_t windows = 0;
};

struct JumpReport {
  std::vector<double> window_medians;
  std::vector<Plateau> plateaus;
  std::vector<double> jump_times;  ///< start of each plateau after the first
};

struct JumpThresholds {
  double flat = 0.05;   ///< consecutive medians within this relative change form a run
  double jump = 0.20;   ///< adjacent runs must differ by more than this to stay separate
  std::size_t min_windows = 2;
};

/// Plateau/jump structure of a uniformly sampled series, using the median of
/// each window of length `window`. Throws ValidationError for fewer than ten
/// complete windows.
JumpReport detect_jumps(std::span<const double> times, std::span<const double> values, double window,
                        const JumpThresholds& th = {});

struct AnalysisOptions {
  Observable output = Observable::photon;
  std::size_t skip_cycles = 0;
  StoringThresholds storing;
  bool include_open_cycles = false;  ///< count open cycles in the mean form factor
  std::size_t jump_windows_per_cycle = 4;  ///< phonon median windows per drive period
};

struct AnalysisSummary {
  std::vector<CycleMetrics> cycles;
  double mean_form_factor = 0.0;   ///< over cycles used (see used_cycles)
  std::size_t used_cycles = 0;     ///< cycles entering the mean
  StoringClass storing = StoringClass::indeterminate;  ///< majority verdict over cycles
  std::optional<JumpReport> phonon_jumps;  ///< set when the trajectory spans >= 10 windows
};

/// normalize + measure_cycle for every cycle, plus the aggregate record.
/// Open cycles are left out of the mean unless every cycle is open or
/// include_open_cycles is set.
AnalysisSummary analyze(const Trajectory& traj, const AnalysisOptions& opt = {});

/// `cycle,area,perimeter,form_factor,n_intersections,storing`
void write_metrics_csv(std::ostream& out, std::span<const CycleMetrics> cycles);
void write_metrics_csv(const std::filesystem::path& path, std::span<const CycleMetrics> cycles);

}  // namespace omem
