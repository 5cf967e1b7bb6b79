#include "omem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "omem/errors.hpp"
#include "omem/log.hpp"

namespace omem {
namespace {

std::size_t nearest_index(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

double relative_change(double a, double b) noexcept {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(b - a) / scale : 0.0;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::string_view to_string(Observable o) noexcept {
  switch (o) {
    case Observable::photon: return "photon";
    case Observable::phonon: return "phonon";
    case Observable::x_c: return "x_c";
    case Observable::p_c: return "p_c";
    case Observable::x_m: return "x_m";
    case Observable::p_m: return "p_m";
  }
  return "unknown";
}

std::optional<Observable> parse_observable(std::string_view name) noexcept {
  for (auto o : {Observable::photon, Observable::phonon, Observable::x_c, Observable::p_c,
                 Observable::x_m, Observable::p_m}) {
    if (to_string(o) == name) return o;
  }
  return std::nullopt;
}

double observable_value(const MeanFieldState& s, Observable o) noexcept {
  switch (o) {
    case Observable::photon: return photon_number(s);
    case Observable::phonon: return phonon_number(s);
    case Observable::x_c: return s.x_c;
    case Observable::p_c: return s.p_c;
    case Observable::x_m: return s.x_m;
    case Observable::p_m: return s.p_m;
  }
  return 0.0;
}

std::string_view to_string(StoringClass s) noexcept {
  switch (s) {
    case StoringClass::storing: return "storing";
    case StoringClass::non_storing: return "non-storing";
    case StoringClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

bool is_closed(std::span<const Point2> pts) noexcept {
  if (pts.size() < 2) return false;
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double diag = std::hypot(xmax - xmin, ymax - ymin);
  const double gap = std::hypot(pts.back().x - pts.front().x, pts.back().y - pts.front().y);
  return gap <= kClosureTolerance * diag;
}

std::vector<LoopCurve> normalize(const Trajectory& traj, Observable output, std::size_t skip_cycles) {
  traj.validate();
  const double dt = traj.sample_dt();
  const double T = traj.period;
  const double t_last = traj.times.back();
  const auto complete = static_cast<std::size_t>(std::floor(t_last / T + 1e-9));
  if (complete <= skip_cycles) {
    throw ValidationError("normalize: trajectory has no complete cycle after skipping " +
                          std::to_string(skip_cycles));
  }
  const std::size_t first = nearest_index(static_cast<double>(skip_cycles) * T, dt);
  const std::size_t last = std::min(nearest_index(static_cast<double>(complete) * T, dt), traj.size() - 1);

  double max_x = 0.0, max_y = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    max_x = std::max(max_x, std::abs(traj.drive[i]));
    max_y = std::max(max_y, std::abs(observable_value(traj.states[i], output)));
  }
  if (max_x == 0.0) throw DegenerateSignalError("normalize: drive is identically zero");
  if (max_y == 0.0) {
    throw DegenerateSignalError("normalize: output '" + std::string(to_string(output)) +
                                "' is identically zero");
  }

  std::vector<LoopCurve> loops;
  for (std::size_t n = skip_cycles + 1; n <= complete; ++n) {
    const std::size_t i0 = nearest_index(static_cast<double>(n - 1) * T, dt);
    const std::size_t i1 = std::min(nearest_index(static_cast<double>(n) * T, dt), traj.size() - 1);
    if (i1 < i0 + 7) throw ValidationError("normalize: fewer than 8 samples per cycle");
    LoopCurve loop;
    loop.cycle_index = n;
    loop.points.reserve(i1 - i0 + 1);
    for (std::size_t i = i0; i <= i1; ++i) {
      loop.points.push_back({traj.drive[i] / max_x, observable_value(traj.states[i], output) / max_y});
    }
    loop.closed = is_closed(loop.points);
    loops.push_back(std::move(loop));
  }
  return loops;
}

double loop_area(std::span<const Point2> pts) {
  if (pts.size() < 3) throw ValidationError("loop_area: need at least 3 points");
  const auto c = circulation(pts);
  const double a = std::abs(c.x_dy);
  const double b = std::abs(c.y_dx);
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  // Both forms are the same polygon sum; any disagreement beyond rounding is a bug.
  const double slack = 1e-10 * std::max(a, b) +
                       64.0 * std::numeric_limits<double>::epsilon() * scale * scale *
                           static_cast<double>(pts.size());
  if (std::abs(a - b) > slack) {
    throw NumericalError("loop_area: circulation forms disagree");
  }
  return 0.5 * (a + b);
}

double memory_area(std::span<const Point2> pts) {
  if (pts.size() < 3) throw ValidationError("memory_area: need at least 3 points");
  const auto simple = simplify_closed(pts);
  if (simple.size() < 3) return 0.0;
  return lobe_area(simple);
}

double loop_perimeter(std::span<const Point2> pts) {
  if (pts.size() < 2) throw ValidationError("loop_perimeter: need at least 2 points");
  // The closing chord belongs to the polygon whose area is measured.
  const Point2& a = pts.back();
  const Point2& b = pts.front();
  return polyline_length(pts) + std::hypot(b.x - a.x, b.y - a.y);
}

double form_factor(std::span<const Point2> pts) {
  const double p = loop_perimeter(pts);
  if (!(p > 0.0)) throw NumericalError("form_factor: zero perimeter");
  const double f = 4.0 * std::numbers::pi * memory_area(pts) / (p * p);
  if (f > 1.0 + 1e-6) {
    std::ostringstream msg;
    msg << "form factor " << f << " exceeds 1 (open cycle?); clamped";
    warn(msg.str());
  }
  return std::clamp(f, 0.0, 1.0);
}

std::size_t count_self_intersections(std::span<const Point2> pts) {
  if (pts.size() < 4) return 0;
  const auto simple = simplify_closed(pts);
  return count_crossings(find_self_contacts(simple));
}

StoringClass classify_storing(std::span<const Point2> pts, const StoringThresholds& th) {
  bool seen = false;
  double min_y = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (std::abs(p.x) < th.eps_x) {
      seen = true;
      min_y = std::min(min_y, std::abs(p.y));
    }
  }
  if (!seen) return StoringClass::indeterminate;
  return min_y < th.eps_y ? StoringClass::non_storing : StoringClass::storing;
}

CycleMetrics measure_cycle(const LoopCurve& curve, const StoringThresholds& th) {
  CycleMetrics m;
  m.cycle_index = curve.cycle_index;
  m.area = memory_area(curve);
  m.perimeter = loop_perimeter(curve);
  m.form_factor = form_factor(curve);
  m.n_intersections = count_self_intersections(curve);
  m.storing = classify_storing(curve, th);
  m.closed = curve.closed;
  return m;
}

JumpReport detect_jumps(std::span<const double> times, std::span<const double> values, double window,
                        const JumpThresholds& th) {
  if (times.size() != values.size()) throw ValidationError("detect_jumps: length mismatch");
  if (times.size() < 2 || !(window > 0.0)) throw ValidationError("detect_jumps: bad series or window");
  const double t0 = times.front();
  const auto n_windows = static_cast<std::size_t>(std::floor((times.back() - t0) / window + 1e-9));
  if (n_windows < 10) throw ValidationError("detect_jumps: need at least 10 complete windows");

  JumpReport report;
  std::vector<std::vector<double>> buckets(n_windows);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::floor((times[i] - t0) / window));
    if (k < n_windows) buckets[k].push_back(values[i]);
  }
  for (auto& b : buckets) {
    report.window_medians.push_back(b.empty() ? 0.0 : median(b));
  }

  const auto& m = report.window_medians;
  std::vector<Plateau> runs;
  std::vector<std::vector<double>> run_levels;
  std::size_t begin = 0;
  auto close_run = [&](std::size_t end) {  // [begin, end)
    if (end - begin < th.min_windows) return;
    Plateau p;
    p.t_start = t0 + static_cast<double>(begin) * window;
    p.t_end = t0 + static_cast<double>(end) * window;
    p.windows = end - begin;
    run_levels.emplace_back(m.begin() + static_cast<std::ptrdiff_t>(begin),
                            m.begin() + static_cast<std::ptrdiff_t>(end));
    p.level = median(run_levels.back());
    runs.push_back(p);
  };
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (relative_change(m[k - 1], m[k]) >= th.flat) {
      close_run(k);
      begin = k;
    }
  }
  close_run(m.size());

  // Neighbouring runs without a real jump between them are one plateau.
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!report.plateaus.empty() && relative_change(report.plateaus.back().level, runs[r].level) <= th.jump) {
      auto& last = report.plateaus.back();
      auto& levels = run_levels[r - 1];
      levels.insert(levels.end(), run_levels[r].begin(), run_levels[r].end());
      run_levels[r] = levels;
      last.t_end = runs[r].t_end;
      last.windows += runs[r].windows;
      last.level = median(levels);
    } else {
      report.plateaus.push_back(runs[r]);
    }
  }
  for (std::size_t p = 1; p < report.plateaus.size(); ++p) {
    report.jump_times.push_back(report.plateaus[p].t_start);
  }
  return report;
}

AnalysisSummary analyze(const Trajectory& traj, const AnalysisOptions& opt) {
  AnalysisSummary summary;
  const auto loops = normalize(traj, opt.output, opt.skip_cycles);
  std::size_t storing = 0, non_storing = 0;
  for (const auto& loop : loops) {
    summary.cycles.push_back(measure_cycle(loop, opt.storing));
    if (summary.cycles.back().storing == StoringClass::storing) ++storing;
    if (summary.cycles.back().storing == StoringClass::non_storing) ++non_storing;
  }
  const bool any_closed = std::any_of(summary.cycles.begin(), summary.cycles.end(),
                                      [](const CycleMetrics& c) { return c.closed; });
  double sum = 0.0;
  for (const auto& c : summary.cycles) {
    if (c.closed || opt.include_open_cycles || !any_closed) {
      sum += c.form_factor;
      ++summary.used_cycles;
    }
  }
  summary.mean_form_factor = summary.used_cycles > 0 ? sum / static_cast<double>(summary.used_cycles) : 0.0;
  if (storing > non_storing) summary.storing = StoringClass::storing;
  if (non_storing > storing) summary.storing = StoringClass::non_storing;

  if (opt.jump_windows_per_cycle == 0) throw ValidationError("analyze: jump_windows_per_cycle must be >= 1");
  const double window = traj.period / static_cast<double>(opt.jump_windows_per_cycle);
  const double span = traj.times.back() - traj.times.front();
  if (span / window >= 10.0 - 1e-9) {
    const auto phonons = traj.phonon_series();
    summary.phonon_jumps = detect_jumps(traj.times, phonons, window);
  }
  return summary;
}

void write_metrics_csv(std::ostream& out, std::span<const CycleMetrics> cycles) {
  out << "cycle,area,perimeter,form_factor,n_intersections,storing\n";
  char buf[160];
  for (const auto& c : cycles) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu,", c.cycle_index, c.area, c.perimeter,
                  c.form_factor, c.n_intersections);
    out << buf << to_string(c.storing) << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const CycleMetrics> cycles) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_metrics_csv(out, cycles);
}

}  // namespace omem
