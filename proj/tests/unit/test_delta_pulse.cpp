#include <gtest/gtest.h>

#include <cmath>

#include "omem/delta_pulse.hpp"
#include "omem/errors.hpp"

namespace {

TEST(AnalyticArea, ClosedForm) {
  EXPECT_NEAR(omem::analytic_delta_area(1.0, 20.0, 1.0, 3.0), 2.0 * std::sqrt(2.0) * 20.0 * std::exp(-6.0), 1e-15);
  EXPECT_EQ(omem::analytic_delta_area(0.0, 20.0, 1.0, 3.0), 0.0);
}

TEST(AnalyticArea, CubicInAmplitude) {
  const double a = omem::analytic_delta_area(0.7, 20.0, 1.0, 2.0);
  EXPECT_NEAR(omem::analytic_delta_area(0.7, 20.0, 2.0, 2.0) / a, 8.0, 1e-12);
}

TEST(AnalyticArea, DecreasesWithDissipationAtFixedKappaTs) {
  double prev = INFINITY;
  for (double kappa : {1.0, 0.1, 0.01}) {
    const double a = omem::analytic_delta_area(kappa, 20.0, 1.0, 3.0 / kappa);
    EXPECT_LT(a, prev);
    prev = a;
  }
}

omem::OmParams bare(double kappa) {
  omem::OmParams p;
  p.g_m = 0.0;
  p.kappa = kappa;
  return p;
}

TEST(Verify, RequiresUncoupledCavity) {
  EXPECT_THROW(omem::verify_delta_pulse(omem::OmParams{}, 1.0, 3.0), omem::ValidationError);
}

TEST(Verify, ReportsThreeWidthsAndAnalyticValue) {
  const auto r = omem::verify_delta_pulse(bare(1.0), 1.0, 3.0);
  ASSERT_EQ(r.sigmas.size(), 3u);
  ASSERT_EQ(r.areas.size(), 3u);
  EXPECT_DOUBLE_EQ(r.sigmas[0], 3.0 / 50.0);
  EXPECT_DOUBLE_EQ(r.sigmas[2], 3.0 / 200.0);
  EXPECT_DOUBLE_EQ(r.analytic_area, omem::analytic_delta_area(1.0, 20.0, 1.0, 3.0));
  EXPECT_TRUE(r.closed);
  for (double a : r.areas) EXPECT_GT(a, 0.0);
}

// With g_m = 0 the cavity is linear, so the regularized loop area is exactly
// cubic in the pulse area.
TEST(Verify, NumericAreaCubicInAmplitude) {
  const auto one = omem::verify_delta_pulse(bare(1.0), 1.0, 3.0);
  const auto two = omem::verify_delta_pulse(bare(1.0), 2.0, 3.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(two.areas[i] / one.areas[i], 8.0, 1e-6);
}

TEST(Verify, NumericAreaShrinksWithDissipation) {
  double prev = INFINITY;
  for (double kappa : {1.0, 0.1, 0.01}) {
    const auto r = omem::verify_delta_pulse(bare(kappa), 1.0, 3.0 / kappa);
    EXPECT_LT(r.numeric_area, prev);
    prev = r.numeric_area;
  }
}

TEST(Verify, ZeroDissipationBranch) {
  const auto r = omem::verify_delta_pulse(bare(0.0), 1.0, 3.0);
  EXPECT_EQ(r.analytic_area, 0.0);
  EXPECT_FALSE(r.closed);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Verify, ShortLoopIsFlagged) {
  const auto r = omem::verify_delta_pulse(bare(1.0), 1.0, 1.0);
  EXPECT_FALSE(r.closed);
  EXPECT_FALSE(r.warnings.empty());
}

}  // namespace
