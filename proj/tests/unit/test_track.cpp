#include <gtest/gtest.h>

#include <random>

#include "oracles/assignment.hpp"
#include "oracles/filters.hpp"
#include "oracles/lsq.hpp"
#include "setscope/track.hpp"
#include "support/common.hpp"

using namespace setscope;

namespace {

CandidateRegion at(double x, double y, double score = 0.9) {
  CandidateRegion c;
  c.centroid = {x, y};
  c.score = score;
  return c;
}

TrackerState fresh(FilterMode mode = FilterMode::Plus) {
  TrackerConfig cfg;
  cfg.filter_mode = mode;
  return TrackerState::from_config(cfg, 1280);
}

std::vector<Point2> monotone_with_tail(int n, int tail) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({400.0 + 20.0 * i, 300.0 + 40.0 * i - 3.0 * i * i});
  const Point2 end = pts.back();
  for (int k = 1; k <= tail; ++k) pts.push_back({end.x - 3.0 * k, end.y});
  return pts;
}

}  // namespace

TEST(Prediction, FrozenExample) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {2, 1}};
  const Point2 p = predict_next(pts);
  EXPECT_DOUBLE_EQ(p.x, 3.0);
  EXPECT_NEAR(p.y, 4.0 / 3.0, 1e-12);
  const Point2 o = oracle::fit_line_at(pts, {0, 1, 2}, 3);
  EXPECT_NEAR(o.y, 4.0 / 3.0, 1e-12);
}

TEST(Prediction, UsesOnlyLastThreePoints) {
  std::vector<Point2> pts{{100, -50}, {0, 0}, {1, 0}, {2, 1}};
  const Point2 p = predict_next(pts);
  EXPECT_NEAR(p.x, 3.0, 1e-12);
  EXPECT_NEAR(p.y, 4.0 / 3.0, 1e-12);
  EXPECT_THROW(predict_next(std::vector<Point2>{{1, 1}}), ValidationError);
}

TEST(Prediction, AgreesWithNormalEquations) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> v(-500, 500);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 2 + rng() % 3;
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {v(rng), v(rng)};
    const std::size_t m = std::min<std::size_t>(3, n);
    const std::vector<Point2> tail(pts.end() - static_cast<std::ptrdiff_t>(m), pts.end());
    std::vector<double> t(m);
    for (std::size_t k = 0; k < m; ++k) t[k] = static_cast<double>(k);
    const Point2 a = predict_next(pts);
    const Point2 b = oracle::fit_line_at(tail, t, static_cast<double>(m));
    ASSERT_NEAR(a.x, b.x, 1e-8);
    ASSERT_NEAR(a.y, b.y, 1e-8);
  }
}

TEST(Prediction, AtFrameBridgesGaps) {
  Blob b;
  b.pts = {{10, 10}, {20, 14}, {30, 18}};
  b.frames = {1, 2, 4};
  const Point2 p = predict_at_frame(b, 6);
  const Point2 o = oracle::fit_line_at(b.pts, {1, 2, 4}, 6);
  EXPECT_NEAR(p.x, o.x, 1e-9);
  EXPECT_NEAR(p.y, o.y, 1e-9);
}

TEST(Filters, AgreeWithDiffCountingOracle) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 5000; ++i) {
    const auto pts = testing_support::random_points(rng, 2 + rng() % 49);
    ASSERT_EQ(evaluate_x_decrease(pts), oracle::x_decrease(pts));
    ASSERT_EQ(evaluate_x_increase(pts), oracle::x_increase(pts));
    ASSERT_EQ(plus_filter_valid(pts), oracle::plus_valid(pts));
  }
}

TEST(Filters, Examples) {
  // x: 0,1,2,1 -> two of three steps increase
  EXPECT_TRUE(evaluate_x_increase(std::vector<Point2>{{0, 0}, {1, 0}, {2, 0}, {1, 0}}));
  // x: 0,1,1,0 -> one up, one flat, one down: neither strict majority
  const std::vector<Point2> flat{{0, 0}, {1, 0}, {1, 0}, {0, 0}};
  EXPECT_FALSE(evaluate_x_increase(flat));
  EXPECT_FALSE(evaluate_x_decrease(flat));
  // exactly half is not a majority
  EXPECT_FALSE(plus_filter_valid(std::vector<Point2>{{0, 0}, {1, 0}, {0, 0}}));
  EXPECT_FALSE(plus_filter_valid(std::vector<Point2>{{3, 3}}));
  EXPECT_TRUE(evaluate_x_decrease(std::vector<Point2>{{3, 3}, {2, 9}}));
}

TEST(BaselineStatus, AgreesWithDirectRules) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 5000; ++i) {
    const auto pts = testing_support::random_points(rng, 1 + rng() % 8);
    const bool moving = update_status_baseline(pts, 5.0) == MovementStatus::DirectedMoving;
    ASSERT_EQ(moving, oracle::baseline_moving(pts, 5.0));
  }
}

TEST(BaselineStatus, Examples) {
  using S = MovementStatus;
  EXPECT_EQ(update_status_baseline(std::vector<Point2>{{0, 0}, {10, 10}}, 5), S::Still);
  EXPECT_EQ(update_status_baseline(std::vector<Point2>{{0, 0}, {10, 10}, {20, 20}}, 5),
            S::DirectedMoving);
  // y reverses at the apex
  EXPECT_EQ(update_status_baseline(std::vector<Point2>{{0, 0}, {10, 10}, {20, 5}}, 5), S::Still);
  // last step 3-4-5 is exactly the threshold: not still, directions agree
  EXPECT_EQ(update_status_baseline(std::vector<Point2>{{0, 0}, {3, 4}, {6, 8}}, 5),
            S::DirectedMoving);
  EXPECT_EQ(update_status_baseline(std::vector<Point2>{{0, 0}, {3, 4}, {5, 7}}, 5), S::Still);
}

TEST(TailFalsePositives, PlusKeepsWhatBaselineRejects) {
  const auto pts = monotone_with_tail(15, 3);
  EXPECT_EQ(update_status_baseline(pts, 5.0), MovementStatus::Still);
  EXPECT_TRUE(plus_filter_valid(pts));

  std::vector<DetectionRecord> recs;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    recs.push_back({static_cast<std::int64_t>(i), {at(pts[i].x, pts[i].y)}});
  }
  for (FilterMode mode : {FilterMode::Baseline, FilterMode::Plus}) {
    TrackerConfig cfg;
    cfg.filter_mode = mode;
    const auto state = track_round(cfg, 1280, recs);
    ASSERT_EQ(state.blobs.size(), 1u);
    EXPECT_EQ(state.blobs[0].pts.size(), 18u);
    const auto harvested = harvest_trajectories(state);
    EXPECT_EQ(harvested.size(), mode == FilterMode::Plus ? 1u : 0u);
  }
}

TEST(Associate, GreedyMatchesExhaustiveOracle) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> coord(0, 150);
  int checked = 0;
  while (checked < 400) {
    const std::size_t nb = 1 + rng() % 4, nc = 1 + rng() % 4;
    std::vector<Point2> blobs(nb), cands(nc);
    for (auto& p : blobs) p = {coord(rng), coord(rng)};
    for (auto& p : cands) p = {coord(rng), coord(rng)};

    TrackerState s = fresh();
    s.association_radius = 60;
    s.spawn_score_floor = 2.0;  // no spawning: only matches matter here
    for (std::size_t i = 0; i < nb; ++i) {
      Blob b;
      b.id = s.next_id++;
      b.pts = {blobs[i]};
      b.frames = {0};
      s.blobs.push_back(b);
    }
    s.last_frame = 0;
    DetectionRecord rec{1, {}};
    for (const auto& c : cands) rec.candidates.push_back(at(c.x, c.y));
    const auto out = associate(s, rec);
    const auto expect = oracle::greedy_by_enumeration(blobs, cands, 60);
    ASSERT_EQ(expect.size(), nb);
    for (std::size_t i = 0; i < nb; ++i) {
      if (expect[i] < 0) {
        ASSERT_EQ(out.blobs[i].pts.size(), 1u);
      } else {
        ASSERT_EQ(out.blobs[i].pts.size(), 2u);
        ASSERT_EQ(out.blobs[i].pts.back(), cands[static_cast<std::size_t>(expect[i])]);
      }
    }
    ++checked;
  }
}

TEST(Associate, CoastsThenFinalizes) {
  TrackerState s = fresh();
  s = associate(s, {0, {at(100, 100)}});
  s = associate(s, {1, {at(110, 105)}});
  for (std::int64_t f = 2; f <= 4; ++f) s = associate(s, {f, {}});  // 3 missed frames
  EXPECT_FALSE(s.blobs[0].finalized);
  s = associate(s, {5, {at(150, 125)}});  // bridged at constant velocity
  EXPECT_EQ(s.blobs.size(), 1u);
  EXPECT_EQ(s.blobs[0].pts.size(), 3u);
  for (std::int64_t f = 6; f <= 9; ++f) s = associate(s, {f, {}});
  s = associate(s, {10, {at(200, 150)}});
  EXPECT_TRUE(s.blobs[0].finalized);
  EXPECT_EQ(s.blobs.size(), 2u);
}

TEST(Associate, SpawnFloorAndOrdering) {
  TrackerState s = fresh();
  s = associate(s, {0, {at(10, 10, 0.29), at(500, 500, 0.3)}});
  ASSERT_EQ(s.blobs.size(), 1u);
  EXPECT_EQ(s.blobs[0].pts[0], (Point2{500, 500}));
  EXPECT_THROW(associate(s, {0, {}}), OrderError);
}

TEST(Associate, RadiusIsAnUpperBound) {
  TrackerState s = fresh();
  s.association_radius = 10;
  s = associate(s, {0, {at(0, 0)}});
  s = associate(s, {1, {at(10, 0)}});  // exactly at the radius: matched
  ASSERT_EQ(s.blobs.size(), 1u);
  s = associate(s, {2, {at(30.5, 0)}});  // prediction (20,0); 10.5 away
  EXPECT_EQ(s.blobs.size(), 2u);
}

TEST(Extraction, LastLongEnoughTrajectoryOrSentinel) {
  auto traj = [](std::size_t n, std::uint64_t id) {
    Trajectory t;
    t.points.assign(n, Point2{1, 1});
    t.source_blob_id = id;
    return t;
  };
  const std::vector<Trajectory> ts{traj(20, 1), traj(9, 2), traj(8, 3)};
  EXPECT_EQ(extract_setting_trajectory(ts).source_blob_id, 2u);
  const std::vector<Trajectory> shorts{traj(4, 1), traj(8, 2)};
  const auto s = extract_setting_trajectory(shorts);
  EXPECT_TRUE(s.is_sentinel());
  EXPECT_EQ(s.points, (std::vector<Point2>{{0, 0}}));
  EXPECT_TRUE(extract_setting_trajectory({}).is_sentinel());
}

TEST(Harvest, KeepsCreationOrder) {
  std::vector<DetectionRecord> recs;
  // two parallel, well separated monotone tracks, the second born later
  for (int f = 0; f < 12; ++f) {
    DetectionRecord r{f, {at(100 + 10.0 * f, 100 + 7.0 * f)}};
    if (f >= 2) r.candidates.push_back(at(900 - 10.0 * f, 500 - 7.0 * f));
    recs.push_back(r);
  }
  TrackerConfig cfg;
  for (FilterMode mode : {FilterMode::Baseline, FilterMode::Plus}) {
    cfg.filter_mode = mode;
    const auto h = harvest_trajectories(track_round(cfg, 1280, recs));
    ASSERT_EQ(h.size(), 2u);
    EXPECT_LT(h[0].source_blob_id, h[1].source_blob_id);
    EXPECT_EQ(extract_setting_trajectory(h).source_blob_id, h[1].source_blob_id);
  }
}

TEST(TrackerConfig, Validation) {
  TrackerConfig cfg;
  cfg.still_threshold = 0;
  EXPECT_THROW(TrackerState::from_config(cfg, 1280), ValidationError);
  cfg = {};
  cfg.association_radius = -1;
  EXPECT_THROW(TrackerState::from_config(cfg, 1280), ValidationError);
  cfg = {};
  EXPECT_DOUBLE_EQ(TrackerState::from_config(cfg, 1920).association_radius, 90.0);
}
