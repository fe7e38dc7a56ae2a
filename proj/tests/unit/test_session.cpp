#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "setscope/session.hpp"
#include "setscope/simulate.hpp"
#include "support/common.hpp"

using namespace setscope;
using testing_support::TempDir;

namespace {

const EngineConfig& cfg() { return testing_support::default_config(); }

std::vector<DetectionRecord> set_stream(TacticLabel label, Team team, std::uint64_t seed = 1) {
  SimulationConfig sim;
  sim.pass_frames = 0;
  NoiseConfig n;
  n.seed = seed;
  return generate_round(find_template(default_templates(), label), n, cfg().calibration,
                        {1, 1, team}, sim, RotationState{1, 1})
      .records;
}

std::vector<DetectionRecord> four_points() {
  std::vector<DetectionRecord> recs;
  for (int i = 0; i < 4; ++i) {
    CandidateRegion c;
    c.centroid = {500.0 + 15 * i, 300.0 + 12 * i};
    c.score = 0.9;
    recs.push_back({i, {c}});
  }
  return recs;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(SessionManager, CreateValidates) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  EngineConfig c = cfg();
  c.initial_positions.clear();
  EXPECT_THROW(m.create(c), ValidationError);
  EXPECT_THROW(m.create(cfg(), std::string("Bad Id")), ValidationError);
  const auto s = m.create(cfg(), std::string("match-1"));
  EXPECT_EQ(s->id(), "match-1");
  EXPECT_THROW(m.create(cfg(), std::string("match-1")), ConflictError);
  const auto fresh = m.create(cfg());
  EXPECT_EQ(fresh->id().size(), 16u);
  EXPECT_EQ(m.ids().size(), 2u);
  EXPECT_THROW(m.get("nope"), NotFoundError);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "sessions" / "match-1" / "config.json"));
}

TEST(Session, StatsExample) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  const auto id = m.create(cfg())->id();
  // odd rounds keep possession with the receiving team, here B
  m.submit_round(id, {1, 1, Team::B}, set_stream(TacticLabel::Quick, Team::B, 1));
  m.submit_round(id, {2, 1, Team::B}, set_stream(TacticLabel::Quick, Team::B, 2));
  m.submit_round(id, {3, 1, Team::B}, set_stream(TacticLabel::Outside, Team::B, 3));
  const auto r = m.submit_round(id, {4, 1, Team::B}, four_points());
  EXPECT_TRUE(r.no_set());
  const auto st = m.get_stats(id);
  EXPECT_EQ(st.rounds_total, 4u);
  EXPECT_EQ(st.team_b.no_set, 1u);
  EXPECT_NEAR(st.team_b.fraction(TacticLabel::Quick), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(st.team_b.fraction(TacticLabel::Outside), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(st.team_a.labeled() + st.team_a.no_set, 0u);
}

TEST(Session, RejectedRoundsLeaveLogUntouched) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  const auto s = m.create(cfg());
  s->submit({3, 1, Team::A}, {});
  const auto log = Session::log_path(dir.path() / "sessions" / s->id());
  const std::string before = read_file(log);
  EXPECT_THROW(s->submit({3, 1, Team::A}, {}), OrderError);  // duplicate
  EXPECT_THROW(s->submit({2, 2, Team::B}, {}), OrderError);  // goes backwards
  std::vector<DetectionRecord> bad{{4, {}}, {4, {}}};
  EXPECT_THROW(s->submit({4, 1, Team::A}, bad), Error);
  // a new set without initial positions for it
  EXPECT_THROW(s->submit({1, 1, Team::B}, {}), ValidationError);
  EXPECT_EQ(read_file(log), before);
  EXPECT_EQ(s->round_count(), 1u);
  EXPECT_NO_THROW(s->submit({3, 2, Team::A}, {}));
}

TEST(Session, NewSetAfterHigherScore) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  EngineConfig c = cfg();
  c.initial_positions = {{1, 1}, {4, 6}};
  const auto s = m.create(c);
  s->submit({1, 1, Team::A}, {});
  s->submit({2, 1, Team::B}, {});
  const auto r = s->submit({1, 1, Team::B}, {});
  EXPECT_EQ(r.rotation, (RotationState{4, 6}));
  EXPECT_THROW(s->submit({1, 1, Team::B}, {}), OrderError);
}

TEST(Session, StatsMatchRecount) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  NoiseConfig n{1.0, 0.05, 0.5, 3, 21};
  const auto match = generate_match(default_templates(), n, cfg().calibration, {}, 30);
  EngineConfig c = cfg();
  c.initial_positions = {match.initial};
  const auto s = m.create(c);
  for (const auto& r : match.rounds) s->submit(r.round_key, r.records);
  const auto rounds = s->rounds();
  ASSERT_EQ(rounds.size(), match.rounds.size());
  std::array<std::size_t, kAllLabels.size()> counts{};
  std::size_t no_set = 0;
  for (const auto& r : rounds) {
    if (r.possession != Team::A) continue;
    if (r.label) ++counts[label_index(*r.label)];
    else ++no_set;
  }
  const auto st = s->stats();
  for (TacticLabel l : kAllLabels) EXPECT_EQ(st.team_a.counts[label_index(l)], counts[label_index(l)]);
  EXPECT_EQ(st.team_a.no_set, no_set);
  EXPECT_EQ(st.rounds_total, rounds.size());
}

TEST(Session, ReplayAfterRestart) {
  TempDir dir("sess");
  NoiseConfig n{0.5, 0.0, 0.3, 0, 4};
  const auto match = generate_match(default_templates(), n, cfg().calibration, {}, 20);
  EngineConfig c = cfg();
  c.initial_positions = {match.initial};
  std::string id;
  nlohmann::json stats_before, rounds_before;
  {
    SessionManager m(dir.path());
    const auto s = m.create(c);
    id = s->id();
    for (std::size_t i = 0; i + 1 < match.rounds.size(); ++i) {
      s->submit(match.rounds[i].round_key, match.rounds[i].records);
    }
    stats_before = to_json(s->stats());
    for (const auto& r : s->rounds()) rounds_before.push_back(to_json(r));
  }
  SessionManager m(dir.path());
  const auto s = m.get(id);
  EXPECT_EQ(to_json(s->stats()), stats_before);
  nlohmann::json rounds_after;
  for (const auto& r : s->rounds()) rounds_after.push_back(to_json(r));
  EXPECT_EQ(rounds_after, rounds_before);
  EXPECT_EQ(s->config().initial_positions, c.initial_positions);
  // the rotation carries on from the log
  const auto& last = match.rounds.back();
  const auto r = s->submit(last.round_key, last.records);
  EXPECT_EQ(r.rotation, last.positions);
  EXPECT_THROW(s->submit(match.rounds.front().round_key, {}), Error);
}

TEST(Session, TornFinalLineIsDropped) {
  TempDir dir("sess");
  std::string id;
  {
    SessionManager m(dir.path());
    const auto s = m.create(cfg());
    id = s->id();
    s->submit({1, 1, Team::A}, {});
    s->submit({2, 1, Team::A}, {});
  }
  const auto log = Session::log_path(dir.path() / "sessions" / id);
  const std::string intact = read_file(log);
  {
    std::ofstream out(log, std::ios::app | std::ios::binary);
    out << R"({"round_key":"3_1_a","sco)";
  }
  SessionManager m(dir.path());
  EXPECT_EQ(m.get(id)->round_count(), 2u);
  EXPECT_EQ(read_file(log), intact);
  EXPECT_NO_THROW(m.submit_round(id, {3, 1, Team::A}, {}));
}

TEST(Session, CorruptCompleteLineIsAnError) {
  TempDir dir("sess");
  std::string id;
  {
    SessionManager m(dir.path());
    id = m.create(cfg())->id();
  }
  std::ofstream(Session::log_path(dir.path() / "sessions" / id)) << "not json\n";
  EXPECT_THROW(SessionManager{dir.path()}, FormatError);
}

TEST(Session, ReadersSeeConsistentSnapshots) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  const auto s = m.create(cfg());
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!done) {
      const auto st = s->stats();
      const std::size_t seen = st.team_a.labeled() + st.team_a.no_set + st.team_b.labeled() +
                               st.team_b.no_set;
      if (seen != st.rounds_total) ++bad;
    }
  });
  for (int i = 1; i <= 40; ++i) s->submit({i, 1, Team::A}, i % 3 ? four_points() : std::vector<DetectionRecord>{});
  done = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(s->stats().rounds_total, 40u);
}

TEST(Session, ConcurrentSubmittersAreSerialized) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  const auto s = m.create(cfg());
  std::atomic<int> accepted{0}, rejected{0};
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t) {
    ts.emplace_back([&] {
      for (int i = 1; i <= 25; ++i) {
        try {
          s->submit({i, 1, Team::A}, {});
          ++accepted;
        } catch (const Error&) {
          // out of order, or a 1_1 read as a new set that has no positions
          ++rejected;
        }
      }
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(accepted + rejected, 100);
  EXPECT_EQ(static_cast<std::size_t>(accepted.load()), s->round_count());
  const auto rounds = s->rounds();
  for (std::size_t i = 1; i < rounds.size(); ++i) {
    EXPECT_TRUE(compare_in_set(rounds[i].key, rounds[i - 1].key) > 0);
  }
}

TEST(Session, EventsArePublished) {
  TempDir dir("sess");
  SessionManager m(dir.path());
  const auto s = m.create(cfg());
  auto q = s->events().subscribe();
  s->submit({1, 1, Team::B}, {});
  const auto e = q->pop(std::chrono::milliseconds(100));
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(nlohmann::json::parse(*e)["round_key"], "1_1_b");
  EXPECT_FALSE(q->pop(std::chrono::milliseconds(10)).has_value());
}
