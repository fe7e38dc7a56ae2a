#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setscope/classify.hpp"
#include "setscope/config.hpp"
#include "setscope/detect.hpp"
#include "setscope/detection.hpp"
#include "setscope/rotation.hpp"
#include "setscope/track.hpp"

namespace setscope {

/// Result of running one round through tracking, extraction and
/// classification. An empty label means no setting trajectory was found.
struct RoundOutcome {
  std::optional<TacticLabel> label;
  std::optional<TrajectoryFeatures> features;
  Trajectory setting = Trajectory::sentinel();
};

/// Tracker -> filter/harvest -> setting extraction -> features -> classify.
/// `records` are court-view detections for one round clip.
inline RoundOutcome analyze_round(const EngineConfig& cfg, FilterMode mode,
                                  std::span<const DetectionRecord> records,
                                  const SetContext& ctx) {
  TrackerConfig tracker = cfg.tracker;
  tracker.filter_mode = mode;
  const TrackerState state = track_round(tracker, cfg.calibration.frame_width, records);
  const auto trajectories = harvest_trajectories(state);
  RoundOutcome out;
  out.setting = extract_setting_trajectory(trajectories);
  if (out.setting.is_sentinel()) {
    return out;
  }
  out.features = compute_features(out.setting, cfg.calibration);
  out.label = classify(*out.features, calculate_areas(cfg.calibration), cfg.coefficients, ctx,
                       cfg.calibration);
  return out;
}

/// Runs the pixel-level detector over decoded frames. Output records are in
/// image coordinates, ready to be written as a detection stream.
inline std::vector<DetectionRecord> detect_frames(const EngineConfig& cfg,
                                                  std::span<const Frame> frames) {
  const auto& cal = cfg.calibration;
  Detector detector(DetectorParams::resolve(cfg.detector, static_cast<int>(cal.frame_width),
                                            static_cast<int>(cal.frame_height)));
  std::vector<DetectionRecord> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    if (f.pixels.width() != static_cast<int>(cal.frame_width) ||
        f.pixels.height() != static_cast<int>(cal.frame_height)) {
      throw ValidationError("frame " + std::to_string(f.index) + " does not match the calibrated size");
    }
    out.push_back(detector.process(f));
  }
  return out;
}

/// Per-round record kept in the session log.
struct RoundResult {
  RoundKey key;
  Team possession = Team::A;
  std::optional<TacticLabel> label;  // empty: no set detected
  std::optional<TrajectoryFeatures> features;
  RotationState rotation;
  bool back_row_a = false;
  bool back_row_b = false;
  double processing_ms = 0.0;

  bool no_set() const { return !label.has_value(); }
};

/// Analyses rounds of one match in order, carrying the rotation state.
class MatchAnalyzer {
 public:
  MatchAnalyzer(EngineConfig cfg, FilterMode mode)
      : cfg_(std::move(cfg)), mode_(mode), rotation_(initial_or_throw(cfg_)) {}

  /// Runs one round. Rotation state only advances when the round succeeds.
  RoundResult analyze(const RoundKey& key, std::span<const DetectionRecord> records,
                      std::optional<Team> possession = std::nullopt) {
    const auto start = std::chrono::steady_clock::now();
    validate_frame_order({records.begin(), records.end()});
    RotationTracker rotation = rotation_;
    const RotationState pos = rotation.advance(key);

    RoundResult result;
    result.key = key;
    result.possession = possession.value_or(possession_team(key));
    result.rotation = pos;
    result.back_row_a = is_back_row(pos.opp_a);
    result.back_row_b = is_back_row(pos.opp_b);
    const SetContext ctx{result.possession, result.back_row_a, result.back_row_b};
    const RoundOutcome outcome = analyze_round(cfg_, mode_, records, ctx);
    result.label = outcome.label;
    result.features = outcome.features;
    result.processing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rotation_ = std::move(rotation);
    return result;
  }

  /// Replays a logged round through the rotation state without re-analysis.
  void replay(const RoundKey& key) { rotation_.advance(key); }

  const EngineConfig& config() const { return cfg_; }
  FilterMode mode() const { return mode_; }
  const RotationTracker& rotation() const { return rotation_; }

 private:
  static std::vector<RotationState> initial_or_throw(const EngineConfig& cfg) {
    if (cfg.initial_positions.empty()) {
      throw ValidationError("initial rotation positions are required");
    }
    return cfg.initial_positions;
  }

  EngineConfig cfg_;
  FilterMode mode_;
  RotationTracker rotation_;
};

// ---------------------------------------------------------------------------
// Tactic distribution

struct TeamDistribution {
  std::array<std::size_t, kAllLabels.size()> counts{};
  std::size_t no_set = 0;

  std::size_t labeled() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
  double fraction(TacticLabel label) const {
    const std::size_t n = labeled();
    return n == 0 ? 0.0 : static_cast<double>(counts[label_index(label)]) / n;
  }

  friend bool operator==(const TeamDistribution&, const TeamDistribution&) = default;
};

/// Per-team label counts over all rounds, attributed to the possessing team.
struct TacticDistribution {
  TeamDistribution team_a;
  TeamDistribution team_b;
  std::size_t rounds_total = 0;

  TeamDistribution& of(Team t) { return t == Team::A ? team_a : team_b; }
  const TeamDistribution& of(Team t) const { return t == Team::A ? team_a : team_b; }

  void add(const RoundResult& r) {
    ++rounds_total;
    auto& team = of(r.possession);
    if (r.label) {
      ++team.counts[label_index(*r.label)];
    } else {
      ++team.no_set;
    }
  }

  friend bool operator==(const TacticDistribution&, const TacticDistribution&) = default;
};

inline TacticDistribution tally(std::span<const RoundResult> rounds) {
  TacticDistribution d;
  for (const auto& r : rounds) d.add(r);
  return d;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const TrajectoryFeatures& f) {
  return {{"sp", f.sp},   {"hp", f.hp},
          {"hya", f.hya}, {"xd", f.xd},
          {"nw", f.nw},   {"setter_height", f.setter_height},
          {"hitter_height", f.hitter_height}};
}

inline TrajectoryFeatures features_from_json(const nlohmann::json& j) {
  TrajectoryFeatures f;
  f.sp = j.at("sp").get<double>();
  f.hp = j.at("hp").get<double>();
  f.hya = j.at("hya").get<double>();
  f.xd = j.at("xd").get<double>();
  f.nw = j.at("nw").get<double>();
  f.setter_height = j.value("setter_height", 0.0);
  f.hitter_height = j.value("hitter_height", 0.0);
  return f;
}

inline std::string label_or_no_set(const std::optional<TacticLabel>& label) {
  return label ? std::string(to_string(*label)) : std::string("NoSet");
}

inline nlohmann::json to_json(const RoundResult& r) {
  nlohmann::json j{{"round_key", r.key.str()},
                   {"score", r.key.score},
                   {"round", r.key.round},
                   {"team", std::string(1, team_char(r.key.team))},
                   {"possession", std::string(1, team_char(r.possession))},
                   {"label", label_or_no_set(r.label)},
                   {"opp_a", r.rotation.opp_a},
                   {"opp_b", r.rotation.opp_b},
                   {"back_row_a", r.back_row_a},
                   {"back_row_b", r.back_row_b},
                   {"processing_ms", r.processing_ms}};
  j["features"] = r.features ? to_json(*r.features) : nlohmann::json(nullptr);
  return j;
}

inline RoundResult round_result_from_json(const nlohmann::json& j) {
  RoundResult r;
  r.key = parse_round_key(j.at("round_key").get<std::string>());
  r.possession = parse_team(j.at("possession").get<std::string>());
  const auto label = j.at("label").get<std::string>();
  if (label != "NoSet") r.label = parse_tactic(label);
  r.rotation = {j.at("opp_a").get<int>(), j.at("opp_b").get<int>()};
  r.back_row_a = j.at("back_row_a").get<bool>();
  r.back_row_b = j.at("back_row_b").get<bool>();
  r.processing_ms = j.at("processing_ms").get<double>();
  if (j.contains("features") && !j.at("features").is_null()) {
    r.features = features_from_json(j.at("features"));
  }
  return r;
}

inline nlohmann::json to_json(const TeamDistribution& d) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json fractions = nlohmann::json::object();
  for (TacticLabel l : kAllLabels) {
    counts[std::string(to_string(l))] = d.counts[label_index(l)];
    fractions[std::string(to_string(l))] = d.fraction(l);
  }
  return {{"counts", counts}, {"fractions", fractions}, {"no_set", d.no_set},
          {"labeled", d.labeled()}};
}

inline nlohmann::json to_json(const TacticDistribution& d) {
  return {{"rounds_total", d.rounds_total},
          {"teams", {{"a", to_json(d.team_a)}, {"b", to_json(d.team_b)}}}};
}

}  // namespace setscope
