#include "omem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace omem {
namespace {

double cross(double ax, double ay, double bx, double by) noexcept { return ax * by - ay * bx; }

Point2 lerp(const Point2& a, const Point2& b, double t) noexcept {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

struct Polygon {
  std::span<const Point2> pts;
  std::size_t n() const noexcept { return pts.size(); }
  const Point2& start(std::size_t i) const noexcept { return pts[i]; }
  const Point2& end(std::size_t i) const noexcept { return pts[(i + 1) % pts.size()]; }
  const Point2& prev_vertex(std::size_t i) const noexcept { return pts[(i + pts.size() - 1) % pts.size()]; }
  Point2 at(std::size_t i, double t) const noexcept { return lerp(start(i), end(i), t); }
  bool adjacent(std::size_t a, std::size_t b) const noexcept {
    const std::size_t m = n();
    return a == b || (a + 1) % m == b || (b + 1) % m == a;
  }
};

// Angle of v in [0, 2 pi).
double angle(double x, double y) noexcept {
  double a = std::atan2(y, x);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

// Directions leaving point v along the curve, for a contact at parameter t on
// segment i. At a vertex (t ~ 0) the curve arrives from the previous vertex.
std::pair<Point2, Point2> local_rays(const Polygon& poly, std::size_t i, double t, const Point2& v,
                                     double tol) {
  const Point2& a = poly.start(i);
  const Point2& b = poly.end(i);
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const Point2 back = (t * len <= tol) ? poly.prev_vertex(i) : a;
  return {{back.x - v.x, back.y - v.y}, {b.x - v.x, b.y - v.y}};
}

// Curve B crosses curve A at v iff exactly one of B's rays lies strictly
// inside the angular sector swept counterclockwise from A's first ray to its
// second. Rays aligned with A's boundary count as a touch.
bool crosses(const std::pair<Point2, Point2>& ra, const std::pair<Point2, Point2>& rb) noexcept {
  constexpr double eps = 1e-12;
  const double a0 = angle(ra.first.x, ra.first.y);
  auto rel = [a0](const Point2& r) {
    double d = angle(r.x, r.y) - a0;
    if (d < 0.0) d += 2.0 * std::numbers::pi;
    return d;
  };
  const double a1 = rel(ra.second);
  const double b0 = rel(rb.first);
  const double b1 = rel(rb.second);
  for (double d : {b0, b1}) {
    if (d < eps || std::abs(d - a1) < eps || 2.0 * std::numbers::pi - d < eps) return false;
  }
  return (b0 < a1) != (b1 < a1);
}

std::optional<SegmentContact> intersect(const Polygon& poly, std::size_t i, std::size_t j, double tol) {
  const Point2& p0 = poly.start(i);
  const Point2& p1 = poly.end(i);
  const Point2& q0 = poly.start(j);
  const Point2& q1 = poly.end(j);
  const double rx = p1.x - p0.x, ry = p1.y - p0.y;
  const double sx = q1.x - q0.x, sy = q1.y - q0.y;
  const double len_r = std::hypot(rx, ry);
  const double len_s = std::hypot(sx, sy);
  if (len_r == 0.0 || len_s == 0.0) return std::nullopt;
  const double denom = cross(rx, ry, sx, sy);
  // Parallel or collinear: no isolated contact point.
  if (std::abs(denom) <= 1e-14 * len_r * len_s) return std::nullopt;
  const double qpx = q0.x - p0.x, qpy = q0.y - p0.y;
  const double t = cross(qpx, qpy, sx, sy) / denom;
  const double u = cross(qpx, qpy, rx, ry) / denom;
  const double tol_t = tol / len_r;
  const double tol_u = tol / len_s;
  if (t < -tol_t || t >= 1.0 - tol_t || u < -tol_u || u >= 1.0 - tol_u) return std::nullopt;

  SegmentContact c;
  c.first = i;
  c.second = j;
  c.t_first = std::clamp(t, 0.0, 1.0);
  c.t_second = std::clamp(u, 0.0, 1.0);
  c.point = lerp(p0, p1, c.t_first);
  c.transverse = crosses(local_rays(poly, i, c.t_first, c.point, tol),
                         local_rays(poly, j, c.t_second, c.point, tol));
  return c;
}

}  // namespace

Circulation circulation(std::span<const Point2> pts) noexcept {
  const std::size_t n = pts.size();
  Circulation c;
  if (n < 3) return c;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& prev = pts[(i + n - 1) % n];
    const Point2& next = pts[(i + 1) % n];
    c.x_dy += pts[i].x * (next.y - prev.y);
    c.y_dx -= pts[i].y * (next.x - prev.x);
  }
  c.x_dy *= 0.5;
  c.y_dx *= 0.5;
  return c;
}

double polyline_length(std::span<const Point2> pts) noexcept {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    len += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  }
  return len;
}

std::vector<Point2> simplify_closed(std::span<const Point2> pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (!out.empty() && p == out.back()) continue;
    // Drop the middle of three exactly collinear points heading the same way.
    if (out.size() >= 2) {
      const Point2& a = out[out.size() - 2];
      const Point2& b = out.back();
      const double ux = b.x - a.x, uy = b.y - a.y, vx = p.x - b.x, vy = p.y - b.y;
      if (cross(ux, uy, vx, vy) == 0.0 && ux * vx + uy * vy > 0.0) out.pop_back();
    }
    out.push_back(p);
  }
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return out;
}

std::vector<SegmentContact> find_self_contacts(std::span<const Point2> pts, const ContactOptions& opt) {
  const Polygon poly{pts};
  const std::size_t n = poly.n();
  std::vector<SegmentContact> out;
  if (n < 4) return out;

  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double pad = 2.0 * opt.endpoint_tolerance;
  xmin -= pad;
  ymin -= pad;
  xmax += pad;
  ymax += pad;

  const auto g = static_cast<std::size_t>(
      std::clamp(std::sqrt(static_cast<double>(n)), 1.0, 512.0));
  const double cw = std::max((xmax - xmin) / static_cast<double>(g), 1e-300);
  const double ch = std::max((ymax - ymin) / static_cast<double>(g), 1e-300);
  auto cell_x = [&](double x) {
    return std::min(g - 1, static_cast<std::size_t>(std::max(0.0, (x - xmin) / cw)));
  };
  auto cell_y = [&](double y) {
    return std::min(g - 1, static_cast<std::size_t>(std::max(0.0, (y - ymin) / ch)));
  };

  std::vector<std::vector<std::size_t>> cells(g * g);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly.start(i);
    const Point2& b = poly.end(i);
    const std::size_t x0 = cell_x(std::min(a.x, b.x) - pad), x1 = cell_x(std::max(a.x, b.x) + pad);
    const std::size_t y0 = cell_y(std::min(a.y, b.y) - pad), y1 = cell_y(std::max(a.y, b.y) + pad);
    for (std::size_t cy = y0; cy <= y1; ++cy) {
      for (std::size_t cx = x0; cx <= x1; ++cx) cells[cy * g + cx].push_back(i);
    }
  }

  for (std::size_t cy = 0; cy < g; ++cy) {
    for (std::size_t cx = 0; cx < g; ++cx) {
      const auto& bucket = cells[cy * g + cx];
      for (std::size_t a = 0; a < bucket.size(); ++a) {
        for (std::size_t b = a + 1; b < bucket.size(); ++b) {
          const std::size_t i = std::min(bucket[a], bucket[b]);
          const std::size_t j = std::max(bucket[a], bucket[b]);
          if (poly.adjacent(i, j)) continue;
          auto c = intersect(poly, i, j, opt.endpoint_tolerance);
          // A pair sharing several cells reports only from the cell holding the point.
          if (c && cell_x(c->point.x) == cx && cell_y(c->point.y) == cy) out.push_back(*c);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SegmentContact& l, const SegmentContact& r) {
    return l.first != r.first ? l.first < r.first : l.second < r.second;
  });
  return out;
}

std::size_t count_crossings(std::span<const SegmentContact> contacts, double cluster_radius) {
  std::vector<Point2> centers;
  for (const auto& c : contacts) {
    if (!c.transverse) continue;
    const bool merged = std::any_of(centers.begin(), centers.end(), [&](const Point2& p) {
      return std::hypot(p.x - c.point.x, p.y - c.point.y) < cluster_radius;
    });
    if (!merged) centers.push_back(c.point);
  }
  return centers.size();
}

double lobe_area(std::span<const Point2> pts, const ContactOptions& opt) {
  const Polygon poly{pts};
  const std::size_t n = poly.n();
  if (n < 3) return 0.0;
  const auto contacts = find_self_contacts(pts, opt);
  if (contacts.empty()) {
    const auto c = circulation(pts);
    return 0.5 * (std::abs(c.x_dy) + std::abs(c.y_dx));
  }

  // Contacts keyed by their later segment.
  std::vector<std::vector<const SegmentContact*>> by_later(n);
  for (const auto& c : contacts) by_later[c.second].push_back(&c);

  // Walk the polygon, cutting off a loop whenever the current segment runs
  // into the live part of the path.
  std::vector<double> start(n, 0.0), stop(n, 1.0);
  std::vector<char> alive(n, 0);
  std::vector<std::size_t> path;
  path.reserve(n);
  std::vector<Point2> loop;
  double total = 0.0;

  auto polygon_area = [](std::span<const Point2> v) {
    const auto c = circulation(v);
    return std::abs(c.x_dy);
  };

  for (std::size_t k = 0; k < n; ++k) {
    double floor_u = -std::numeric_limits<double>::infinity();
    while (true) {
      const SegmentContact* hit = nullptr;
      for (const SegmentContact* c : by_later[k]) {
        const std::size_t j = c->first;
        if (!alive[j] || path.empty() || j == path.back()) continue;
        if (c->t_second <= floor_u) continue;
        if (c->t_first < start[j] || c->t_first >= stop[j]) continue;
        if (!hit || c->t_second < hit->t_second) hit = c;
      }
      if (!hit) break;

      const std::size_t j = hit->first;
      loop.clear();
      loop.push_back(hit->point);
      auto it = std::find(path.begin(), path.end(), j);
      for (; it != path.end(); ++it) loop.push_back(poly.at(*it, stop[*it]));
      total += polygon_area(loop);

      while (path.back() != j) {
        alive[path.back()] = 0;
        path.pop_back();
      }
      stop[j] = hit->t_first;
      start[k] = hit->t_second;
      floor_u = hit->t_second;
    }
    path.push_back(k);
    alive[k] = 1;
  }

  loop.clear();
  if (!path.empty()) loop.push_back(poly.at(path.front(), start[path.front()]));
  for (std::size_t s : path) loop.push_back(poly.at(s, stop[s]));
  total += polygon_area(loop);
  return total;
}

}  // namespace omem
