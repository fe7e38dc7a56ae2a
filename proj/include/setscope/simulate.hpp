#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml++/toml.hpp>

#include "setscope/classify.hpp"
#include "setscope/config.hpp"
#include "setscope/detect.hpp"
#include "setscope/detection.hpp"
#include "setscope/pipeline.hpp"
#include "setscope/rotation.hpp"

namespace setscope {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  template <typename Rng>
  double sample(Rng& rng) const {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Nominal set shape for one tactic, parameterized on team B's side in
/// court-view pixels. Apex heights are multiples of the net width.
struct TacticTemplate {
  TacticLabel label = TacticLabel::Unknown;
  Range start_x;
  Range end_x;
  Range apex_nw;
  Range duration;  // frames, sampled as an integer
};

/// Physics and staging of a simulated round.
struct SimulationConfig {
  double gravity_nw = 0.00857;  // net widths per frame^2
  int lead_in_frames = 4;       // empty frames before the pass
  int pass_frames = 22;         // 0 disables the pass segment
  double pass_apex_nw = 2.2;
  double pass_dx = 250.0;       // horizontal travel of the pass
  int contact_gap_frames = 6;   // ball hidden in the setter's hands
  double tail_fp_step = 3.0;    // x step of each trailing false positive
  double ball_area = 200.0;
  double ball_circularity = 0.9;
  double ball_score = 0.9;
};

struct NoiseConfig {
  double jitter_sigma = 0.0;
  double dropout_rate = 0.0;
  double clutter_rate = 0.0;
  int tail_fp_count = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(jitter_sigma >= 0.0) || !(clutter_rate >= 0.0) || tail_fp_count < 0) {
      throw ValidationError("noise: rates and counts must be non-negative");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate <= 1.0)) {
      throw ValidationError("noise: dropout_rate must be in [0, 1]");
    }
  }
};

struct GenerationStats {
  int ball_frames = 0;  // frames where the true ball could have been detected
  int dropped = 0;
  int clutter = 0;
  int tail_fps = 0;
};

struct LabeledRound {
  std::vector<DetectionRecord> records;  // court-view
  TacticLabel truth = TacticLabel::Unknown;
  RoundKey round_key;
  bool truth_back_row = false;  // back-row status of the possessing team's opposite
  RotationState positions;      // rotation in effect for this round
  GenerationStats stats;
  std::vector<std::int64_t> ball_frames;  // frames on the true pass/set path
};

/// One template per tactic, calibrated for the default 1280x720 camera
/// (net from x=240 to x=1040, net top/bottom at image y 420/570).
inline std::vector<TacticTemplate> default_templates() {
  using L = TacticLabel;
  return {
      {L::Quick, {540, 580}, {620, 660}, {1.5, 1.7}, {14, 16}},
      {L::ThirtyOne, {280, 300}, {780, 820}, {1.9, 2.2}, {20, 22}},
      {L::BackOne, {620, 660}, {500, 540}, {1.5, 1.7}, {14, 16}},
      {L::Short, {500, 540}, {770, 790}, {1.1, 1.15}, {16, 18}},
      {L::Outside, {520, 580}, {960, 1000}, {2.3, 2.6}, {26, 30}},
      {L::Bic, {540, 580}, {620, 680}, {0.75, 0.8}, {14, 14}},
      {L::DBall, {560, 600}, {260, 300}, {1.0, 1.1}, {20, 22}},
      {L::Oppo, {560, 600}, {260, 300}, {1.0, 1.1}, {20, 22}},
  };
}

inline const TacticTemplate& find_template(const std::vector<TacticTemplate>& templates,
                                           TacticLabel label) {
  for (const auto& t : templates) {
    if (t.label == label) return t;
  }
  throw ValidationError("no template for tactic " + std::string(to_string(label)));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Simulates one round: a pass into the setter, a hidden contact, then the
/// set as a gravity parabola from start_x to end_x, plus optional jitter,
/// dropouts, uniform clutter and trailing false positives that step back
/// against the set direction. Team A possessions are mirrored about the
/// net midline. Deterministic in `noise.seed`.
///
/// `positions` fixes the rotation in effect; when absent it is sampled so the
/// possessing team's opposite is back row for DBall and front row for Oppo.
inline LabeledRound generate_round(const TacticTemplate& tpl, const NoiseConfig& noise,
                                   const NetCalibration& cal, const RoundKey& key,
                                   const SimulationConfig& sim = {},
                                   std::optional<RotationState> positions = std::nullopt) {
  noise.validate();
  cal.validate();
  std::mt19937_64 rng(noise.seed);
  const Team team = possession_team(key);
  const double nw = cal.net_width();
  const double g = sim.gravity_nw * nw;
  if (!(g > 0.0)) throw ValidationError("simulation: gravity must be positive");

  const int duration = static_cast<int>(std::lround(tpl.duration.sample(rng)));
  const double apex = tpl.apex_nw.sample(rng) * nw;
  const double sx = tpl.start_x.sample(rng);
  const double ex = tpl.end_x.sample(rng);
  if (sim.lead_in_frames < 0 || sim.contact_gap_frames < 0 || sim.pass_frames < 0) {
    throw ValidationError("simulation: frame counts must be non-negative");
  }
  if (duration < 2) throw ValidationError("simulation: set duration must be at least 2 frames");
  if (sx < cal.lnx || sx > cal.rnx || ex < cal.lnx || ex > cal.rnx) {
    throw ValidationError("simulation: set endpoints fall outside the court");
  }
  const double half = duration / 2.0;
  const double contact = apex - 0.5 * g * half * half;
  if (contact < 0.0) {
    throw ValidationError("simulation: set apex too low for its duration");
  }

  // Pass from pass_dx behind the set direction down to the setter's hands.
  const double dir = ex >= sx ? 1.0 : -1.0;
  const double px = std::clamp(sx + dir * sim.pass_dx, cal.lnx, cal.rnx);
  const double pass_apex = std::max(sim.pass_apex_nw * nw, contact + 0.25 * nw);
  const double fall = std::sqrt(2.0 * (pass_apex - contact) / g);
  const double rise_end = sim.pass_frames - fall;  // time of the pass apex

  auto place = [&](double x) { return team == Team::A ? cal.mirror_x(x) : x; };
  auto in_frame = [&](Point2 p) {
    return Point2{std::clamp(p.x, 0.0, cal.frame_width), std::clamp(p.y, 0.0, cal.frame_height)};
  };
  auto check_height = [&](double y) {
    if (y < 0.0 || y > cal.frame_height) {
      throw ValidationError("simulation: trajectory leaves the frame vertically");
    }
  };

  LabeledRound out;
  out.truth = tpl.label;
  out.round_key = key;

  if (positions) {
    positions->validate();
    out.positions = *positions;
  } else {
    std::uniform_int_distribution<int> any(1, 6);
    const std::array<int, 3> back{1, 5, 6};
    const std::array<int, 3> front{2, 3, 4};
    std::uniform_int_distribution<int> pick(0, 2);
    int own = any(rng);
    if (tpl.label == TacticLabel::DBall) own = back[pick(rng)];
    if (tpl.label == TacticLabel::Oppo) own = front[pick(rng)];
    const int theirs = any(rng);
    out.positions = team == Team::A ? RotationState{own, theirs} : RotationState{theirs, own};
  }
  out.truth_back_row = is_back_row(out.positions.of(team));
  if (tpl.label == TacticLabel::DBall || tpl.label == TacticLabel::Oppo) {
    out.truth = out.truth_back_row ? TacticLabel::DBall : TacticLabel::Oppo;
  }

  // True path, frame by frame.
  struct BallSample {
    std::int64_t frame;
    Point2 p;
  };
  std::vector<BallSample> path;
  std::int64_t frame = sim.lead_in_frames;
  if (sim.pass_frames > 0) {
    for (int t = 0; t <= sim.pass_frames; ++t, ++frame) {
      const double dt = t - rise_end;
      const double y = pass_apex - 0.5 * g * dt * dt;
      check_height(y);
      path.push_back({frame, {place(px + (sx - px) * t / sim.pass_frames), y}});
    }
    frame += sim.contact_gap_frames;
  }
  for (int t = 0; t <= duration; ++t, ++frame) {
    const double dt = t - half;
    const double y = apex - 0.5 * g * dt * dt;
    check_height(y);
    path.push_back({frame, {place(sx + (ex - sx) * t / duration), y}});
  }
  const Point2 terminal = path.back().p;
  const double back_step = (team == Team::A ? dir : -dir) * sim.tail_fp_step;
  const std::int64_t last_frame = frame - 1 + noise.tail_fp_count;

  std::normal_distribution<double> jitter(0.0, noise.jitter_sigma > 0.0 ? noise.jitter_sigma : 1.0);
  std::bernoulli_distribution drop(noise.dropout_rate);
  std::poisson_distribution<int> clutter_count(noise.clutter_rate > 0.0 ? noise.clutter_rate : 1.0);
  std::uniform_real_distribution<double> ux(0.0, cal.frame_width);
  std::uniform_real_distribution<double> uy(0.0, cal.frame_height);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> clutter_area(40.0, 400.0);

  auto ball_candidate = [&](Point2 p) {
    CandidateRegion c;
    c.centroid = p;
    c.bbox = {static_cast<int>(p.x), static_cast<int>(p.y), 1, 1};
    c.area = sim.ball_area;
    c.circularity = sim.ball_circularity;
    c.score = sim.ball_score;
    return c;
  };

  std::size_t next_path = 0;
  for (std::int64_t f = 0; f <= last_frame; ++f) {
    DetectionRecord rec{f, {}};
    if (next_path < path.size() && path[next_path].frame == f) {
      Point2 p = path[next_path].p;
      ++next_path;
      ++out.stats.ball_frames;
      out.ball_frames.push_back(f);
      if (noise.jitter_sigma > 0.0) {
        p.x += jitter(rng);
        p.y += jitter(rng);
      }
      const bool dropped = noise.dropout_rate > 0.0 && drop(rng);
      if (dropped) {
        ++out.stats.dropped;
      } else {
        rec.candidates.push_back(ball_candidate(in_frame(p)));
      }
    } else if (f > path.back().frame) {
      const auto k = static_cast<double>(f - path.back().frame);
      rec.candidates.push_back(ball_candidate(in_frame({terminal.x + k * back_step, terminal.y})));
      ++out.stats.tail_fps;
    }
    if (noise.clutter_rate > 0.0) {
      const int n = clutter_count(rng);
      for (int i = 0; i < n; ++i) {
        CandidateRegion c;
        c.centroid = {ux(rng), uy(rng)};
        c.bbox = {static_cast<int>(c.centroid.x), static_cast<int>(c.centroid.y), 1, 1};
        c.area = clutter_area(rng);
        c.circularity = unit(rng);
        c.score = unit(rng);
        rec.candidates.push_back(c);
        ++out.stats.clutter;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

/// Runs a labeled round through the full chain. Empty result: no set found.
inline std::optional<TacticLabel> run_pipeline(const LabeledRound& round, FilterMode mode,
                                               const EngineConfig& cfg) {
  const Team team = possession_team(round.round_key);
  const SetContext ctx{team, is_back_row(round.positions.opp_a),
                       is_back_row(round.positions.opp_b)};
  return analyze_round(cfg, mode, round.records, ctx).label;
}

// ---------------------------------------------------------------------------
// Datasets

/// `per_tactic` independent rounds of every template, each its own rally
/// (round 1), with the possessing team drawn at random.
inline std::vector<LabeledRound> generate_benchmark(const std::vector<TacticTemplate>& templates,
                                                    const NoiseConfig& noise,
                                                    const NetCalibration& cal,
                                                    const SimulationConfig& sim,
                                                    int per_tactic) {
  std::vector<LabeledRound> rounds;
  std::mt19937_64 rng(noise.seed);
  int score = 0;
  for (const auto& tpl : templates) {
    for (int i = 0; i < per_tactic; ++i) {
      NoiseConfig n = noise;
      n.seed = mix_seed(noise.seed, static_cast<std::uint64_t>(score));
      const RoundKey key{++score, 1, (rng() & 1) ? Team::A : Team::B};
      rounds.push_back(generate_round(tpl, n, cal, key, sim));
    }
  }
  return rounds;
}

struct SimulatedMatch {
  RotationState initial;
  std::vector<LabeledRound> rounds;
};

/// One set of `count` rounds: rallies of one or two rounds, random side-outs,
/// rotation tracked from random initial positions. Opposite-side sets become
/// DBall or Oppo according to the tracked rotation.
inline SimulatedMatch generate_match(const std::vector<TacticTemplate>& templates,
                                     const NoiseConfig& noise, const NetCalibration& cal,
                                     const SimulationConfig& sim, int count) {
  if (templates.empty()) throw ValidationError("simulation: no templates");
  std::mt19937_64 rng(noise.seed);
  std::uniform_int_distribution<int> pos(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, templates.size() - 1);
  SimulatedMatch match;
  match.initial.opp_a = pos(rng);
  match.initial.opp_b = pos(rng);
  RotationTracker rotation({match.initial});
  Team receiver = (rng() & 1) ? Team::A : Team::B;
  std::uint64_t stream = 0;
  for (int rally = 1; static_cast<int>(match.rounds.size()) < count; ++rally) {
    if (rally > 1 && (rng() & 1)) receiver = other(receiver);
    const int rounds = 1 + static_cast<int>(rng() % 2);
    for (int r = 1; r <= rounds && static_cast<int>(match.rounds.size()) < count; ++r) {
      const RoundKey key{rally, r, receiver};
      const RotationState state = rotation.advance(key);
      NoiseConfig n = noise;
      n.seed = mix_seed(noise.seed, stream++);
      match.rounds.push_back(generate_round(templates[pick(rng)], n, cal, key, sim, state));
    }
  }
  return match;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Prediction {
  RoundKey key;
  TacticLabel truth;
  std::optional<TacticLabel> predicted;
};

struct AccuracyCell {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t no_set = 0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

/// Correct detections over total detections, overall and per true label.
struct AccuracyReport {
  FilterMode mode = FilterMode::Plus;
  std::array<AccuracyCell, kAllLabels.size()> per_label{};
  AccuracyCell overall;
  std::vector<Prediction> log;

  const AccuracyCell& of(TacticLabel l) const { return per_label[label_index(l)]; }
};

inline AccuracyReport score_predictions(std::vector<Prediction> log, FilterMode mode) {
  if (log.empty()) {
    throw ValidationError("evaluate: dataset is empty");
  }
  AccuracyReport report;
  report.mode = mode;
  for (const auto& p : log) {
    auto& cell = report.per_label[label_index(p.truth)];
    const bool ok = p.predicted && *p.predicted == p.truth;
    for (auto* c : {&cell, &report.overall}) {
      ++c->total;
      c->correct += ok;
      c->no_set += !p.predicted;
    }
  }
  report.log = std::move(log);
  return report;
}

inline AccuracyReport evaluate(const std::vector<LabeledRound>& dataset, FilterMode mode,
                               const EngineConfig& cfg) {
  std::vector<Prediction> log;
  log.reserve(dataset.size());
  for (const auto& round : dataset) {
    log.push_back({round.round_key, round.truth, run_pipeline(round, mode, cfg)});
  }
  return score_predictions(std::move(log), mode);
}

inline nlohmann::json to_json(const AccuracyReport& r) {
  auto cell = [](const AccuracyCell& c) {
    return nlohmann::json{{"total", c.total},
                          {"correct", c.correct},
                          {"no_set", c.no_set},
                          {"accuracy", c.accuracy()}};
  };
  nlohmann::json per = nlohmann::json::object();
  for (TacticLabel l : kAllLabels) {
    if (r.of(l).total > 0) per[std::string(to_string(l))] = cell(r.of(l));
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& p : r.log) {
    log.push_back({{"round_key", p.key.str()},
                   {"truth", std::string(to_string(p.truth))},
                   {"predicted", label_or_no_set(p.predicted)}});
  }
  return {{"mode", to_string(r.mode)}, {"overall", cell(r.overall)}, {"per_tactic", per},
          {"predictions", log}};
}

// ---------------------------------------------------------------------------
// Files: templates / noise (TOML), dataset directory (manifest + streams)

namespace detail {

inline Range read_range(const toml::table& t, std::string_view key) {
  const auto* arr = t.get_as<toml::array>(key);
  if (!arr || arr->size() != 2 || !(*arr)[0].value<double>() || !(*arr)[1].value<double>()) {
    throw ValidationError("templates: '" + std::string(key) + "' must be [lo, hi]");
  }
  Range r{*(*arr)[0].value<double>(), *(*arr)[1].value<double>()};
  if (r.lo > r.hi) throw ValidationError("templates: '" + std::string(key) + "' has lo > hi");
  return r;
}

inline toml::table parse_toml_file(const std::filesystem::path& path) {
  try {
    return toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    throw FormatError(msg.str());
  }
}

}  // namespace detail

struct TemplateSet {
  std::vector<TacticTemplate> templates;
  SimulationConfig simulation;
};

inline TemplateSet parse_templates(const toml::table& root) {
  TemplateSet set;
  if (const auto* sim = root.get_as<toml::table>("simulation")) {
    auto& s = set.simulation;
    s.gravity_nw = (*sim)["gravity_nw"].value_or(s.gravity_nw);
    s.lead_in_frames = (*sim)["lead_in_frames"].value_or(s.lead_in_frames);
    s.pass_frames = (*sim)["pass_frames"].value_or(s.pass_frames);
    s.pass_apex_nw = (*sim)["pass_apex_nw"].value_or(s.pass_apex_nw);
    s.pass_dx = (*sim)["pass_dx"].value_or(s.pass_dx);
    s.contact_gap_frames = (*sim)["contact_gap_frames"].value_or(s.contact_gap_frames);
    s.tail_fp_step = (*sim)["tail_fp_step"].value_or(s.tail_fp_step);
    s.ball_area = (*sim)["ball_area"].value_or(s.ball_area);
    s.ball_circularity = (*sim)["ball_circularity"].value_or(s.ball_circularity);
    s.ball_score = (*sim)["ball_score"].value_or(s.ball_score);
  }
  const auto* list = root.get_as<toml::array>("templates");
  if (!list || list->empty()) {
    set.templates = default_templates();
    return set;
  }
  for (const auto& node : *list) {
    const auto* t = node.as_table();
    if (!t) throw ValidationError("templates: each [[templates]] entry must be a table");
    const auto label = (*t)["label"].value<std::string>();
    if (!label) throw ValidationError("templates: entry without a label");
    set.templates.push_back({parse_tactic(*label), detail::read_range(*t, "start_x"),
                             detail::read_range(*t, "end_x"), detail::read_range(*t, "apex_nw"),
                             detail::read_range(*t, "duration")});
  }
  return set;
}

inline TemplateSet load_templates(const std::filesystem::path& path) {
  return parse_templates(detail::parse_toml_file(path));
}

inline NoiseConfig parse_noise(const toml::table& root) {
  NoiseConfig n;
  const toml::table* t = root.get_as<toml::table>("noise");
  if (!t) t = &root;
  n.jitter_sigma = (*t)["jitter_sigma"].value_or(0.0);
  n.dropout_rate = (*t)["dropout_rate"].value_or(0.0);
  n.clutter_rate = (*t)["clutter_rate"].value_or(0.0);
  n.tail_fp_count = (*t)["tail_fp_count"].value_or(0);
  n.seed = static_cast<std::uint64_t>((*t)["seed"].value_or(std::int64_t{0}));
  n.validate();
  return n;
}

inline NoiseConfig load_noise(const std::filesystem::path& path) {
  return parse_noise(detail::parse_toml_file(path));
}

/// Writes one stream per round under rounds/ (named by round key) plus
/// manifest.json at the top of `dir`.
inline void write_dataset(const std::filesystem::path& dir, const std::vector<LabeledRound>& rounds,
                          const NetCalibration& cal) {
  std::filesystem::create_directories(dir / "rounds");
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& r : rounds) {
    const std::string file = "rounds/" + r.round_key.str() + ".ndjson";
    std::ofstream out(dir / file);
    if (!out) throw Error("cannot write " + (dir / file).string());
    write_detection_stream(out, r.records, cal.frame_height);
    entries.push_back({{"file", file},
                       {"truth", std::string(to_string(r.truth))},
                       {"round_key", r.round_key.str()},
                       {"pos_a", r.positions.opp_a},
                       {"pos_b", r.positions.opp_b},
                       {"truth_back_row", r.truth_back_row}});
  }
  std::ofstream manifest(dir / "manifest.json");
  manifest << nlohmann::json{{"frame_height", cal.frame_height}, {"rounds", entries}}.dump(2)
           << '\n';
}

inline std::vector<LabeledRound> read_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw NotFoundError("dataset: no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("dataset manifest: " + std::string(e.what()));
  }
  const double height = manifest.at("frame_height").get<double>();
  std::vector<LabeledRound> rounds;
  for (const auto& e : manifest.at("rounds")) {
    LabeledRound r;
    r.truth = parse_tactic(e.at("truth").get<std::string>());
    r.round_key = parse_round_key(e.at("round_key").get<std::string>());
    r.positions = {e.at("pos_a").get<int>(), e.at("pos_b").get<int>()};
    r.positions.validate();
    r.truth_back_row = e.value("truth_back_row", is_back_row(r.positions.of(possession_team(r.round_key))));
    const auto path = dir / e.at("file").get<std::string>();
    std::ifstream stream(path);
    if (!stream) throw NotFoundError("dataset: missing round file " + path.string());
    r.records = read_detection_stream(stream, height);
    rounds.push_back(std::move(r));
  }
  return rounds;
}

// ---------------------------------------------------------------------------
// Synthetic frames for exercising the pixel-level detector

/// Renders each candidate as a bright disk (area-matched) over a static
/// textured background with mild per-frame sensor noise.
inline std::vector<Frame> render_frames(const std::vector<DetectionRecord>& records,
                                        const NetCalibration& cal, std::uint64_t seed,
                                        double fps = 24.0) {
  const int w = static_cast<int>(cal.frame_width);
  const int h = static_cast<int>(cal.frame_height);
  std::mt19937_64 rng(seed);
  GrayImage background(w, h);
  std::uniform_int_distribution<int> texture(-6, 6);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int base = 70 + (40 * y) / h + (20 * x) / w;
      background(x, y) = static_cast<std::uint8_t>(base + texture(rng));
    }
  }
  std::uniform_int_distribution<int> sensor(-2, 2);
  std::vector<Frame> frames;
  frames.reserve(records.size());
  for (const auto& rec : records) {
    Frame f{background, rec.frame_index, rec.frame_index / fps};
    for (auto& px : f.pixels.pixels()) {
      px = static_cast<std::uint8_t>(std::clamp(int(px) + sensor(rng), 0, 255));
    }
    for (const auto& c : rec.candidates) {
      const Point2 img = to_court_view(c.centroid, cal.frame_height);
      const double r = std::sqrt(std::max(c.area, 1.0) / std::numbers::pi);
      const int x0 = std::max(0, static_cast<int>(std::floor(img.x - r)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(img.x + r)));
      const int y0 = std::max(0, static_cast<int>(std::floor(img.y - r)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(img.y + r)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if ((x - img.x) * (x - img.x) + (y - img.y) * (y - img.y) <= r * r) {
            f.pixels(x, y) = 235;
          }
        }
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace setscope
