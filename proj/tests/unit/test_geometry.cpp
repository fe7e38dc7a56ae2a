#include <gtest/gtest.h>

#include <random>

#include "setscope/geometry.hpp"

using namespace setscope;

TEST(CourtView, FlipsYAgainstFrameHeight) {
  EXPECT_EQ(to_court_view(Point2{100, 20}, 720), (Point2{100, 700}));
  EXPECT_EQ(to_court_view(to_court_view(Point2{3.5, 611.25}, 720), 720), (Point2{3.5, 611.25}));
}

TEST(NetCalibration, FromImageCoordinates) {
  const auto cal = NetCalibration::from_image(240, 1040, 420, 570, 720, 1280);
  EXPECT_DOUBLE_EQ(cal.uny, 300.0);
  EXPECT_DOUBLE_EQ(cal.lny, 150.0);
  EXPECT_DOUBLE_EQ(cal.net_width(), 150.0);
  EXPECT_DOUBLE_EQ(cal.net_span(), 800.0);
}

TEST(NetCalibration, RejectsBadGeometry) {
  EXPECT_THROW(NetCalibration::from_image(1040, 240, 420, 570, 720, 1280), ValidationError);
  EXPECT_THROW(NetCalibration::from_image(500, 500, 420, 570, 720, 1280), ValidationError);
  // net top below net bottom
  EXPECT_THROW(NetCalibration::from_image(240, 1040, 570, 420, 720, 1280), ValidationError);
}

TEST(NetCalibration, MirrorSwapsNetEnds) {
  const auto cal = NetCalibration::from_image(240, 1040, 420, 570, 720, 1280);
  EXPECT_DOUBLE_EQ(cal.mirror_x(240), 1040);
  EXPECT_DOUBLE_EQ(cal.mirror_x(1040), 240);
  EXPECT_DOUBLE_EQ(cal.mirror_x(640), 640);
}

TEST(CalculateAreas, EqualFifths) {
  const auto s = calculate_areas(0, 1000);
  EXPECT_DOUBLE_EQ(s.p1, 200);
  EXPECT_DOUBLE_EQ(s.p2, 400);
  EXPECT_DOUBLE_EQ(s.p3, 600);
  EXPECT_DOUBLE_EQ(s.p4, 800);

  const auto d = calculate_areas(240, 1040);
  EXPECT_DOUBLE_EQ(d.p1, 400);
  EXPECT_DOUBLE_EQ(d.p2, 560);
  EXPECT_DOUBLE_EQ(d.p3, 720);
  EXPECT_DOUBLE_EQ(d.p4, 880);
}

TEST(CalculateAreas, RejectsInvertedNet) {
  EXPECT_THROW(calculate_areas(500, 500), ValidationError);
  EXPECT_THROW(calculate_areas(900, 100), ValidationError);
}

TEST(CalculateAreas, PropertyOrderedAndEvenlySpaced) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-2000, 2000), len(1e-3, 3000);
  for (int i = 0; i < 2000; ++i) {
    const double lnx = pos(rng);
    const double rnx = lnx + len(rng);
    const auto s = calculate_areas(lnx, rnx);
    ASSERT_LT(lnx, s.p1);
    ASSERT_LT(s.p1, s.p2);
    ASSERT_LT(s.p2, s.p3);
    ASSERT_LT(s.p3, s.p4);
    ASSERT_LT(s.p4, rnx);
    const double step = (rnx - lnx) / 5.0;
    for (double gap : {s.p1 - lnx, s.p2 - s.p1, s.p3 - s.p2, s.p4 - s.p3, rnx - s.p4}) {
      ASSERT_NEAR(gap, step, 1e-9 * (1.0 + std::abs(lnx) + std::abs(rnx)));
    }
  }
}

TEST(TacticCoefficients, MustBePositive) {
  EXPECT_NO_THROW((TacticCoefficients{1.2, 1.5, 1.0, 0.9}.validate()));
  EXPECT_THROW((TacticCoefficients{0.0, 1.5, 1.0, 0.9}.validate()), ValidationError);
  EXPECT_THROW((TacticCoefficients{1.2, -1.0, 1.0, 0.9}.validate()), ValidationError);
}
