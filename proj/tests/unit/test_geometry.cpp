#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "omem/geometry.hpp"

namespace {

using omem::Point2;

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Independent O(N^2) proper-crossing count for closed polygons in general position.
std::size_t brute_force_crossings(const std::vector<Point2>& p) {
  const std::size_t n = p.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const Point2 &a = p[i], &b = p[(i + 1) % n], &c = p[j], &d = p[(j + 1) % n];
      const bool split_cd = (orient(a, b, c) > 0) != (orient(a, b, d) > 0);
      const bool split_ab = (orient(c, d, a) > 0) != (orient(c, d, b) > 0);
      if (split_cd && split_ab) ++count;
    }
  }
  return count;
}

TEST(Contacts, MatchBruteForceOnRandomPolygons) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> size(4, 160);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> pts(static_cast<std::size_t>(size(rng)));
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto contacts = omem::find_self_contacts(pts);
    std::size_t transverse = 0;
    for (const auto& c : contacts) transverse += c.transverse ? 1 : 0;
    ASSERT_EQ(transverse, brute_force_crossings(pts)) << "trial " << trial;
    ASSERT_EQ(contacts.size(), transverse) << "trial " << trial;
  }
}

TEST(Contacts, SortedAndNonAdjacent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> pts(300);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto contacts = omem::find_self_contacts(pts);
  ASSERT_FALSE(contacts.empty());
  for (std::size_t k = 0; k < contacts.size(); ++k) {
    EXPECT_LT(contacts[k].first + 1, contacts[k].second);
    if (k > 0) {
      EXPECT_TRUE(contacts[k - 1].first < contacts[k].first ||
                  (contacts[k - 1].first == contacts[k].first && contacts[k - 1].second <= contacts[k].second));
    }
  }
}

TEST(Contacts, VertexOnEdgeTouchIsNotACrossing) {
  const std::vector<Point2> pts{{0, 0}, {4, 0}, {4, 2}, {2, 0}, {0, 2}};
  const auto contacts = omem::find_self_contacts(pts);
  ASSERT_EQ(contacts.size(), 1u);
  EXPECT_FALSE(contacts[0].transverse);
  EXPECT_EQ(omem::count_crossings(contacts), 0u);
  EXPECT_NEAR(omem::lobe_area(pts), 4.0, 1e-12);
}

TEST(Contacts, CrossingThroughVertexCountedOnce) {
  // The second diagonal passes exactly through a vertex placed on the first.
  const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}, {2, 0}, {0, 2}};
  const auto contacts = omem::find_self_contacts(pts);
  EXPECT_EQ(omem::count_crossings(contacts), 1u);
}

TEST(Crossings, ClusterNearbyPoints) {
  std::vector<omem::SegmentContact> cs(3);
  cs[0].point = {0.0, 0.0};
  cs[1].point = {5e-5, 0.0};
  cs[2].point = {1.0, 0.0};
  for (auto& c : cs) c.transverse = true;
  EXPECT_EQ(omem::count_crossings(cs, 1e-4), 2u);
  EXPECT_EQ(omem::count_crossings(cs, 1e-6), 3u);
}

TEST(Circulation, SquareBothForms) {
  const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto c = omem::circulation(sq);
  EXPECT_DOUBLE_EQ(c.x_dy, 1.0);
  EXPECT_DOUBLE_EQ(c.y_dx, 1.0);
  const std::vector<Point2> rev{{0, 1}, {1, 1}, {1, 0}, {0, 0}};
  EXPECT_DOUBLE_EQ(omem::circulation(rev).x_dy, -1.0);
}

TEST(LobeArea, BowTieSumsBothLobes) {
  const std::vector<Point2> bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  EXPECT_NEAR(omem::circulation(bow).x_dy, 0.0, 1e-15);
  EXPECT_NEAR(omem::lobe_area(bow), 2.0, 1e-12);
}

TEST(LobeArea, SimplePolygonEqualsShoelace) {
  std::vector<Point2> c;
  for (int i = 0; i < 500; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 500.0;
    c.push_back({std::cos(t) * (1.0 + 0.3 * std::cos(3 * t)), std::sin(t) * (1.0 + 0.3 * std::cos(3 * t))});
  }
  EXPECT_NEAR(omem::lobe_area(c), std::abs(omem::circulation(c).x_dy), 1e-12);
}

TEST(LobeArea, TrefoilLikeCurveCountsEveryLobe) {
  // r = cos(3t) rose: three petals, each of area pi/12, all through the origin.
  std::vector<Point2> rose;
  const int n = 3000;
  for (int i = 0; i < n; ++i) {
    const double t = std::numbers::pi * (i + 0.5) / n;
    const double r = std::cos(3.0 * t);
    rose.push_back({r * std::cos(t), r * std::sin(t)});
  }
  EXPECT_NEAR(omem::lobe_area(rose), std::numbers::pi / 4.0, 1e-3);
}

TEST(LobeArea, DoubleLoopLimacon) {
  // r = 1 + 2 cos t: the inner loop turns the same way as the outer one, so
  // both measures give outer + inner = 3 pi.
  std::vector<Point2> l;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    const double r = 1.0 + 2.0 * std::cos(t);
    l.push_back({r * std::cos(t), r * std::sin(t)});
  }
  const double pi = std::numbers::pi;
  const double inner = pi - 3.0 * std::sqrt(3.0) / 2.0;
  const double outer = 2.0 * pi + 3.0 * std::sqrt(3.0) / 2.0;
  EXPECT_NEAR(std::abs(omem::circulation(l).x_dy), outer + inner, 1e-3);
  EXPECT_NEAR(omem::lobe_area(l), outer + inner, 1e-3);
  EXPECT_EQ(omem::count_crossings(omem::find_self_contacts(l)), 1u);
}

TEST(Simplify, RemovesDuplicatesAndStraightRuns) {
  const std::vector<Point2> pts{{0, 0}, {0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 1}, {0, 0}};
  const auto s = omem::simplify_closed(pts);
  const std::vector<Point2> expect{{0, 0}, {2, 0}, {2, 1}};
  EXPECT_EQ(s, expect);
}

TEST(Simplify, KeepsReversals) {
  const std::vector<Point2> pts{{0, 0}, {2, 0}, {1, 0}};
  EXPECT_EQ(omem::simplify_closed(pts).size(), 3u);
}

TEST(Length, OpenPolyline) {
  const std::vector<Point2> pts{{0, 0}, {3, 4}, {3, 0}};
  EXPECT_DOUBLE_EQ(omem::polyline_length(pts), 9.0);
}

}  // namespace
