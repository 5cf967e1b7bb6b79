#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "omem/analysis.hpp"
#include "omem/errors.hpp"
#include "omem/integrator.hpp"

namespace {

using omem::Point2;
constexpr double kPi = std::numbers::pi;

std::vector<Point2> sample(const std::function<Point2(double)>& f, int n) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(f(2.0 * kPi * i / n));
  return pts;
}

std::vector<Point2> circle(int n, bool repeat_start = false) {
  auto pts = sample([](double t) { return Point2{std::cos(t), std::sin(t)}; }, n);
  if (repeat_start) pts.push_back(pts.front());
  return pts;
}

std::vector<Point2> lemniscate(int n) {
  return sample([](double t) {
    const double d = 1.0 + std::sin(t) * std::sin(t);
    return Point2{std::cos(t) / d, std::sin(t) * std::cos(t) / d};
  }, n);
}

// Trajectory whose drive is x(t) and whose photon number is y(t).
omem::Trajectory synthetic(const std::function<double(double)>& x, const std::function<double(double)>& y,
                           double period, int cycles, int per_cycle = 400) {
  omem::Trajectory t;
  t.period = period;
  const int n = cycles * per_cycle;
  for (int i = 0; i <= n; ++i) {
    const double time = period * i / per_cycle;
    t.times.push_back(time);
    t.drive.push_back(x(time));
    t.states.push_back({std::sqrt(2.0 * y(time)), 0.0, 0.0, 0.0});
  }
  return t;
}

TEST(Area, UnitCircle) {
  EXPECT_NEAR(omem::loop_area(circle(1000)), kPi, 1e-4 * kPi);
  EXPECT_NEAR(omem::loop_perimeter(circle(1000)), 2.0 * kPi, 1e-4 * 2.0 * kPi);
  EXPECT_NEAR(omem::form_factor(circle(1000)), 1.0, 1e-3);
}

TEST(Area, BackAndForthSegmentIsZero) {
  std::vector<Point2> seg;
  for (int i = 0; i <= 100; ++i) seg.push_back({i / 100.0, i / 100.0});
  for (int i = 99; i > 0; --i) seg.push_back({i / 100.0, i / 100.0});
  EXPECT_LT(omem::loop_area(seg), 1e-12);
  EXPECT_LT(omem::memory_area(seg), 1e-12);
  EXPECT_NEAR(omem::loop_perimeter(seg), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_LT(omem::form_factor(seg), 1e-12);
}

TEST(Area, RejectsTooFewPoints) {
  const std::vector<Point2> two{{0, 0}, {1, 1}};
  EXPECT_THROW(omem::loop_area(two), omem::ValidationError);
  const std::vector<Point2> same(5, Point2{0.3, 0.3});
  EXPECT_THROW(omem::form_factor(same), omem::NumericalError);
}

TEST(Area, FigureEightCountsBothLobes) {
  const auto l = lemniscate(2000);
  EXPECT_LT(omem::loop_area(l), 1e-9);
  const double lobe = omem::memory_area(l);
  EXPECT_GT(lobe, 0.5);
  EXPECT_LE(omem::form_factor(l), 0.5);
}

TEST(Intersections, CircleAndLemniscate) {
  EXPECT_EQ(omem::count_self_intersections(circle(1000)), 0u);
  EXPECT_EQ(omem::count_self_intersections(lemniscate(2000)), 1u);
}

TEST(Properties, IsoperimetricBoundOnRandomCurves) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> coef(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    double a[4][4];
    for (auto& row : a) {
      for (auto& v : row) v = coef(rng);
    }
    const auto pts = sample([&](double t) {
      Point2 p{};
      for (int k = 1; k <= 4; ++k) {
        p.x += (a[0][k - 1] * std::cos(k * t) + a[1][k - 1] * std::sin(k * t)) / k;
        p.y += (a[2][k - 1] * std::cos(k * t) + a[3][k - 1] * std::sin(k * t)) / k;
      }
      return p;
    }, 1000);
    const double f = omem::form_factor(pts);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-9);
  }
}

TEST(Properties, MemorylessResponseEnclosesNothing) {
  for (double r : {-3.0, 0.5, 7.0}) {
    const auto pts = sample([r](double t) { return Point2{std::sin(t), r * std::sin(t)}; }, 997);
    EXPECT_LT(omem::memory_area(pts), 1e-10 * 2.0 * 2.0 * std::abs(r));
  }
}

TEST(Properties, OrientationInvariance) {
  const auto fwd = lemniscate(1500);
  const std::vector<Point2> rev(fwd.rbegin(), fwd.rend());
  EXPECT_NEAR(omem::memory_area(rev), omem::memory_area(fwd), 1e-12);
  EXPECT_NEAR(omem::loop_perimeter(rev), omem::loop_perimeter(fwd), 1e-12);
  EXPECT_NEAR(omem::form_factor(rev), omem::form_factor(fwd), 1e-12);
}

TEST(Properties, ResamplingInvariance) {
  const auto f = [](double t) { return Point2{std::cos(t) + 0.3 * std::cos(2 * t), std::sin(t)}; };
  const auto coarse = sample(f, 20000);
  const auto fine = sample(f, 40000);
  EXPECT_NEAR(omem::memory_area(fine) / omem::memory_area(coarse), 1.0, 1e-6);
  EXPECT_NEAR(omem::form_factor(fine) / omem::form_factor(coarse), 1.0, 1e-6);
  // Midpoint refinement of the same polygon is exact.
  std::vector<Point2> mid;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto& a = coarse[i];
    const auto& b = coarse[(i + 1) % coarse.size()];
    mid.push_back(a);
    mid.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }
  EXPECT_NEAR(omem::memory_area(mid), omem::memory_area(coarse), 1e-12);
  EXPECT_NEAR(omem::form_factor(mid), omem::form_factor(coarse), 1e-12);
}

TEST(Properties, GreenFormsAgree) {
  const auto c = omem::circulation(circle(777));
  EXPECT_NEAR(c.x_dy, c.y_dx, 1e-6 * std::abs(c.x_dy));
}

TEST(Normalize, GlobalScaleAcrossCycles) {
  // Amplitude grows between cycles; normalization uses the largest cycle.
  const auto traj = synthetic([](double t) { return (1.0 + std::floor(t / 10.0)) * std::sin(2 * kPi * t / 10.0); },
                              [](double t) { return 1.0 + std::cos(2 * kPi * t / 10.0); }, 10.0, 2);
  const auto loops = omem::normalize(traj, omem::Observable::photon);
  ASSERT_EQ(loops.size(), 2u);
  double max0 = 0.0, max1 = 0.0;
  for (const auto& p : loops[0].points) max0 = std::max(max0, std::abs(p.x));
  for (const auto& p : loops[1].points) max1 = std::max(max1, std::abs(p.x));
  EXPECT_NEAR(max0, 0.5, 1e-3);
  EXPECT_NEAR(max1, 1.0, 1e-3);
  EXPECT_EQ(loops[1].cycle_index, 2u);
}

TEST(Normalize, SkipsLeadingCycles) {
  const auto traj = synthetic([](double t) { return std::sin(t); }, [](double t) { return 1.0 + std::cos(t); },
                              2 * kPi, 4);
  EXPECT_EQ(omem::normalize(traj, omem::Observable::photon, 1).size(), 3u);
  EXPECT_THROW(omem::normalize(traj, omem::Observable::photon, 4), omem::ValidationError);
}

TEST(Normalize, DegenerateSignals) {
  const auto zero_y = synthetic([](double t) { return std::sin(t); }, [](double) { return 0.0; }, 2 * kPi, 1);
  EXPECT_THROW(omem::normalize(zero_y, omem::Observable::photon), omem::DegenerateSignalError);
  const auto zero_x = synthetic([](double) { return 0.0; }, [](double) { return 1.0; }, 2 * kPi, 1);
  EXPECT_THROW(omem::normalize(zero_x, omem::Observable::photon), omem::DegenerateSignalError);
}

TEST(Normalize, ConstantDriveGivesZeroArea) {
  const auto traj = synthetic([](double) { return 2.0; }, [](double t) { return 1.5 + std::sin(t); }, 2 * kPi, 1);
  const auto loops = omem::normalize(traj, omem::Observable::photon);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_LT(omem::memory_area(loops[0]), 1e-12);
}

TEST(Storing, ThreeVerdicts) {
  const auto storing = sample([](double t) { return Point2{std::sin(t), 0.5 + 0.4 * std::cos(t)}; }, 800);
  EXPECT_EQ(omem::classify_storing(storing), omem::StoringClass::storing);
  const auto pinched = sample([](double t) { return Point2{std::sin(t), std::sin(t) * std::sin(t)}; }, 800);
  EXPECT_EQ(omem::classify_storing(pinched), omem::StoringClass::non_storing);
  const auto away = sample([](double t) { return Point2{0.6 + 0.3 * std::sin(t), std::cos(t)}; }, 800);
  EXPECT_EQ(omem::classify_storing(away), omem::StoringClass::indeterminate);
}

TEST(Jumps, StaircaseOfThreeLevels) {
  std::vector<double> t, v;
  for (int i = 0; i < 3000; ++i) {
    t.push_back(i * 0.01);
    v.push_back(i < 1000 ? 1.0 : (i < 2000 ? 2.0 : 3.5));
  }
  const auto r = omem::detect_jumps(t, v, 1.0);
  ASSERT_EQ(r.plateaus.size(), 3u);
  EXPECT_DOUBLE_EQ(r.plateaus[0].level, 1.0);
  EXPECT_DOUBLE_EQ(r.plateaus[1].level, 2.0);
  EXPECT_DOUBLE_EQ(r.plateaus[2].level, 3.5);
  ASSERT_EQ(r.jump_times.size(), 2u);
  EXPECT_NEAR(r.jump_times[0], 10.0, 1e-9);
  EXPECT_NEAR(r.jump_times[1], 20.0, 1e-9);
}

TEST(Jumps, SmoothRampHasNoJumps) {
  std::vector<double> t, v;
  for (int i = 0; i <= 5000; ++i) {
    t.push_back(i * 0.01);
    v.push_back(1.0 + i * 0.01);
  }
  const auto r = omem::detect_jumps(t, v, 1.0);
  EXPECT_LE(r.plateaus.size(), 1u);
  EXPECT_TRUE(r.jump_times.empty());
}

TEST(Jumps, NeedsTenWindows) {
  std::vector<double> t{0, 1, 2, 3, 4, 5}, v(6, 1.0);
  EXPECT_THROW(omem::detect_jumps(t, v, 1.0), omem::ValidationError);
}

TEST(Analyze, OpenFirstCycleLeftOutOfMean) {
  // Slow decay of an offset makes the first cycle fail to close.
  const auto traj = synthetic([](double t) { return std::sin(t); },
                              [](double t) { return 1.0 + 0.5 * std::cos(t) + 0.5 * std::exp(-3.0 * t); }, 2 * kPi, 4);
  const auto s = omem::analyze(traj);
  ASSERT_EQ(s.cycles.size(), 4u);
  EXPECT_FALSE(s.cycles[0].closed);
  EXPECT_EQ(s.used_cycles, 3u);
  omem::AnalysisOptions all;
  all.include_open_cycles = true;
  EXPECT_EQ(omem::analyze(traj, all).used_cycles, 4u);
}

TEST(Analyze, MetricsCsvHeader) {
  const auto traj = synthetic([](double t) { return std::sin(t); }, [](double t) { return 1.0 + std::cos(t); },
                              2 * kPi, 2);
  const auto s = omem::analyze(traj);
  std::ostringstream out;
  omem::write_metrics_csv(out, s.cycles);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "cycle,area,perimeter,form_factor,n_intersections,storing");
  EXPECT_NE(text.find("\n1,"), std::string::npos);
  EXPECT_NE(text.find("storing"), std::string::npos);
}

TEST(Observables, NamesRoundTrip) {
  for (auto o : {omem::Observable::photon, omem::Observable::phonon, omem::Observable::x_c, omem::Observable::p_c,
                 omem::Observable::x_m, omem::Observable::p_m}) {
    EXPECT_EQ(omem::parse_observable(omem::to_string(o)), o);
  }
  EXPECT_FALSE(omem::parse_observable("photons").has_value());
}

}  // namespace
