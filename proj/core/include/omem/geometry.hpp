#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace omem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Both discrete circulations of a closed polygon (last vertex joins the
/// first). For a polygon they agree up to rounding.
struct Circulation {
  double x_dy = 0.0;  ///<  sum x_i (y_{i+1} - y_{i-1}) / 2
  double y_dx = 0.0;  ///< -sum y_i (x_{i+1} - x_{i-1}) / 2
};

Circulation circulation(std::span<const Point2> pts) noexcept;

/// Sum of segment lengths along the polyline (no closing chord).
double polyline_length(std::span<const Point2> pts) noexcept;

/// Contact between two non-adjacent segments of a closed polygon.
/// Segment i runs from pts[i] to pts[(i + 1) % n]; each segment owns the
/// half-open parameter range [0, 1), so a contact at a shared vertex is
/// reported once.
struct SegmentContact {
  std::size_t first = 0;   ///< lower segment index
  std::size_t second = 0;  ///< higher segment index
  double t_first = 0.0;
  double t_second = 0.0;
  Point2 point;
  bool transverse = false;  ///< the curves actually cross (not a touch)
};

struct ContactOptions {
  double endpoint_tolerance = 1e-9;  ///< absolute, in curve units
};

/// All contacts of the closed polygon with itself. Uses a uniform-grid broad
/// phase; results are sorted by (first, second).
std::vector<SegmentContact> find_self_contacts(std::span<const Point2> pts,
                                               const ContactOptions& opt = {});

/// Number of transverse self-crossings, merging crossings closer than
/// `cluster_radius` into one.
std::size_t count_crossings(std::span<const SegmentContact> contacts, double cluster_radius = 1e-4);

/// Area of the closed polygon counted lobe by lobe: the polygon is split at
/// its self-contacts into simple loops and their unsigned areas are summed.
/// Equals |circulation| for a simple polygon; for a figure eight it is the
/// sum of both lobes instead of their difference.
double lobe_area(std::span<const Point2> pts, const ContactOptions& opt = {});

/// Drops consecutive duplicates, interior vertices of exactly collinear
/// same-direction runs, and a final vertex equal to the first.
std::vector<Point2> simplify_closed(std::span<const Point2> pts);

}  // namespace omem
