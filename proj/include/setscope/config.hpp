#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml++/toml.hpp>

#include "setscope/detect.hpp"
#include "setscope/errors.hpp"
#include "setscope/geometry.hpp"
#include "setscope/rotation.hpp"
#include "setscope/track.hpp"

namespace setscope {

/// Everything needed to analyse rounds from one camera setup.
struct EngineConfig {
  NetCalibration calibration;  // court-view
  TacticCoefficients coefficients{};
  TrackerConfig tracker;
  DetectorConfig detector;
  std::vector<RotationState> initial_positions;  // one entry per set

  void validate() const {
    calibration.validate();
    coefficients.validate();
    TrackerState::from_config(tracker, calibration.frame_width);
    DetectorParams::resolve(detector, static_cast<int>(calibration.frame_width),
                            static_cast<int>(calibration.frame_height));
    for (const auto& p : initial_positions) p.validate();
  }
};

namespace detail {

template <typename T>
T require(const toml::table& tbl, std::string_view section, std::string_view key) {
  const auto* node = tbl.get(key);
  if (!node) {
    throw ValidationError("config: missing " + std::string(section) + "." + std::string(key));
  }
  if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value<std::string>()) return *v;
  } else {
    if (auto v = node->value<T>()) return *v;
  }
  throw ValidationError("config: " + std::string(section) + "." + std::string(key) +
                        " has the wrong type");
}

template <typename T>
std::optional<T> optional_value(const toml::table* tbl, std::string_view section,
                                std::string_view key) {
  if (!tbl || !tbl->contains(key)) return std::nullopt;
  return require<T>(*tbl, section, key);
}

inline const toml::table& require_table(const toml::table& root, std::string_view name) {
  const auto* t = root.get_as<toml::table>(name);
  if (!t) {
    throw ValidationError("config: missing [" + std::string(name) + "] section");
  }
  return *t;
}

}  // namespace detail

/// Parses a TOML config. Calibration is given in image pixels (y down) and
/// converted to court-view here.
inline EngineConfig parse_config(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at line " << e.source().begin.line;
    throw FormatError(msg.str());
  }
  using detail::optional_value;
  using detail::require;

  EngineConfig cfg;
  const auto& cal = detail::require_table(root, "calibration");
  const double height = require<double>(cal, "calibration", "frame_height");
  const double width = optional_value<double>(&cal, "calibration", "frame_width")
                           .value_or(std::round(height * 16.0 / 9.0));
  cfg.calibration = NetCalibration::from_image(
      require<double>(cal, "calibration", "lnx"), require<double>(cal, "calibration", "rnx"),
      require<double>(cal, "calibration", "uny"), require<double>(cal, "calibration", "lny"),
      height, width);

  const auto& coef = detail::require_table(root, "coefficients");
  cfg.coefficients = {require<double>(coef, "coefficients", "q"),
                      require<double>(coef, "coefficients", "m"),
                      require<double>(coef, "coefficients", "s"),
                      require<double>(coef, "coefficients", "c")};

  const auto* trk = root.get_as<toml::table>("tracker");
  auto& t = cfg.tracker;
  t.still_threshold =
      optional_value<double>(trk, "tracker", "still_threshold").value_or(t.still_threshold);
  t.association_radius = optional_value<double>(trk, "tracker", "association_radius");
  t.max_coast_frames = static_cast<int>(
      optional_value<std::int64_t>(trk, "tracker", "max_coast_frames").value_or(t.max_coast_frames));
  t.spawn_score_floor =
      optional_value<double>(trk, "tracker", "spawn_score_floor").value_or(t.spawn_score_floor);
  if (auto mode = optional_value<std::string>(trk, "tracker", "mode")) {
    t.filter_mode = parse_filter_mode(*mode);
  }

  const auto* det = root.get_as<toml::table>("detector");
  auto& d = cfg.detector;
  d.sigma = optional_value<double>(det, "detector", "sigma");
  d.learning_rate = optional_value<double>(det, "detector", "learning_rate").value_or(d.learning_rate);
  d.threshold = optional_value<double>(det, "detector", "threshold").value_or(d.threshold);
  d.open_radius = static_cast<int>(
      optional_value<std::int64_t>(det, "detector", "open_radius").value_or(d.open_radius));
  d.close_radius = static_cast<int>(
      optional_value<std::int64_t>(det, "detector", "close_radius").value_or(d.close_radius));
  d.min_area = optional_value<double>(det, "detector", "min_area");
  d.max_area = optional_value<double>(det, "detector", "max_area");
  d.max_candidates = static_cast<int>(
      optional_value<std::int64_t>(det, "detector", "max_candidates").value_or(d.max_candidates));

  if (const auto* rot = root.get_as<toml::table>("rotation")) {
    if (const auto* sets = rot->get_as<toml::array>("initial_positions")) {
      for (const auto& entry : *sets) {
        const auto* pair = entry.as_array();
        if (!pair || pair->size() != 2 || !(*pair)[0].value<std::int64_t>() ||
            !(*pair)[1].value<std::int64_t>()) {
          throw ValidationError("config: rotation.initial_positions entries are [pos_a, pos_b]");
        }
        cfg.initial_positions.push_back({static_cast<int>(*(*pair)[0].value<std::int64_t>()),
                                         static_cast<int>(*(*pair)[1].value<std::int64_t>())});
      }
    }
  }
  cfg.validate();
  return cfg;
}

inline EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw NotFoundError("config: cannot open " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline std::string to_toml(const EngineConfig& cfg) {
  const auto& c = cfg.calibration;
  toml::table root;
  root.insert("calibration", toml::table{{"lnx", c.lnx},
                                         {"rnx", c.rnx},
                                         {"uny", c.frame_height - c.uny},
                                         {"lny", c.frame_height - c.lny},
                                         {"frame_height", c.frame_height},
                                         {"frame_width", c.frame_width}});
  const auto& k = cfg.coefficients;
  root.insert("coefficients", toml::table{{"q", k.q}, {"m", k.m}, {"s", k.s}, {"c", k.c}});
  toml::table trk{{"still_threshold", cfg.tracker.still_threshold},
                  {"max_coast_frames", cfg.tracker.max_coast_frames},
                  {"spawn_score_floor", cfg.tracker.spawn_score_floor},
                  {"mode", to_string(cfg.tracker.filter_mode)}};
  if (cfg.tracker.association_radius) {
    trk.insert("association_radius", *cfg.tracker.association_radius);
  }
  root.insert("tracker", std::move(trk));
  const auto& d = cfg.detector;
  toml::table det{{"learning_rate", d.learning_rate},
                  {"threshold", d.threshold},
                  {"open_radius", d.open_radius},
                  {"close_radius", d.close_radius},
                  {"max_candidates", d.max_candidates}};
  if (d.sigma) det.insert("sigma", *d.sigma);
  if (d.min_area) det.insert("min_area", *d.min_area);
  if (d.max_area) det.insert("max_area", *d.max_area);
  root.insert("detector", std::move(det));
  toml::array sets;
  for (const auto& p : cfg.initial_positions) sets.push_back(toml::array{p.opp_a, p.opp_b});
  root.insert("rotation", toml::table{{"initial_positions", std::move(sets)}});
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON form, used by the HTTP API and the session snapshot. Same keys as TOML.

inline nlohmann::json config_to_json(const EngineConfig& cfg) {
  const auto& c = cfg.calibration;
  nlohmann::json j;
  j["calibration"] = {{"lnx", c.lnx},
                      {"rnx", c.rnx},
                      {"uny", c.frame_height - c.uny},
                      {"lny", c.frame_height - c.lny},
                      {"frame_height", c.frame_height},
                      {"frame_width", c.frame_width}};
  const auto& k = cfg.coefficients;
  j["coefficients"] = {{"q", k.q}, {"m", k.m}, {"s", k.s}, {"c", k.c}};
  j["tracker"] = {{"still_threshold", cfg.tracker.still_threshold},
                  {"max_coast_frames", cfg.tracker.max_coast_frames},
                  {"spawn_score_floor", cfg.tracker.spawn_score_floor}};
  if (cfg.tracker.association_radius) {
    j["tracker"]["association_radius"] = *cfg.tracker.association_radius;
  }
  const auto& d = cfg.detector;
  j["detector"] = {{"learning_rate", d.learning_rate},
                   {"threshold", d.threshold},
                   {"open_radius", d.open_radius},
                   {"close_radius", d.close_radius},
                   {"max_candidates", d.max_candidates}};
  if (d.sigma) j["detector"]["sigma"] = *d.sigma;
  if (d.min_area) j["detector"]["min_area"] = *d.min_area;
  if (d.max_area) j["detector"]["max_area"] = *d.max_area;
  j["filter_mode"] = to_string(cfg.tracker.filter_mode);
  j["initial_positions"] = nlohmann::json::array();
  for (const auto& p : cfg.initial_positions) {
    j["initial_positions"].push_back({p.opp_a, p.opp_b});
  }
  return j;
}

/// Reads the JSON form. Missing sections fall back to `defaults` when given.
inline EngineConfig config_from_json(const nlohmann::json& j,
                                     const std::optional<EngineConfig>& defaults = std::nullopt) {
  if (!j.is_object()) {
    throw ValidationError("session config must be a JSON object");
  }
  auto number = [](const nlohmann::json& obj, const char* section, const char* key) -> double {
    if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number()) {
      throw ValidationError(std::string("missing numeric ") + section + "." + key);
    }
    return obj.at(key).get<double>();
  };
  EngineConfig cfg = defaults.value_or(EngineConfig{});
  if (j.contains("calibration")) {
    const auto& c = j.at("calibration");
    const double height = number(c, "calibration", "frame_height");
    const double width = c.contains("frame_width") ? number(c, "calibration", "frame_width")
                                                   : std::round(height * 16.0 / 9.0);
    cfg.calibration = NetCalibration::from_image(
        number(c, "calibration", "lnx"), number(c, "calibration", "rnx"),
        number(c, "calibration", "uny"), number(c, "calibration", "lny"), height, width);
  } else if (!defaults) {
    throw ValidationError("missing calibration");
  }
  if (j.contains("coefficients")) {
    const auto& k = j.at("coefficients");
    cfg.coefficients = {number(k, "coefficients", "q"), number(k, "coefficients", "m"),
                        number(k, "coefficients", "s"), number(k, "coefficients", "c")};
  } else if (!defaults) {
    throw ValidationError("missing coefficients");
  }
  if (j.contains("tracker")) {
    const auto& t = j.at("tracker");
    if (!t.is_object()) throw ValidationError("tracker must be an object");
    if (t.contains("still_threshold")) cfg.tracker.still_threshold = number(t, "tracker", "still_threshold");
    if (t.contains("association_radius"))
      cfg.tracker.association_radius = number(t, "tracker", "association_radius");
    if (t.contains("max_coast_frames"))
      cfg.tracker.max_coast_frames = static_cast<int>(number(t, "tracker", "max_coast_frames"));
    if (t.contains("spawn_score_floor"))
      cfg.tracker.spawn_score_floor = number(t, "tracker", "spawn_score_floor");
  }
  if (j.contains("detector")) {
    const auto& d = j.at("detector");
    if (!d.is_object()) throw ValidationError("detector must be an object");
    auto& out = cfg.detector;
    if (d.contains("sigma")) out.sigma = number(d, "detector", "sigma");
    if (d.contains("learning_rate")) out.learning_rate = number(d, "detector", "learning_rate");
    if (d.contains("threshold")) out.threshold = number(d, "detector", "threshold");
    if (d.contains("open_radius")) out.open_radius = static_cast<int>(number(d, "detector", "open_radius"));
    if (d.contains("close_radius"))
      out.close_radius = static_cast<int>(number(d, "detector", "close_radius"));
    if (d.contains("min_area")) out.min_area = number(d, "detector", "min_area");
    if (d.contains("max_area")) out.max_area = number(d, "detector", "max_area");
    if (d.contains("max_candidates"))
      out.max_candidates = static_cast<int>(number(d, "detector", "max_candidates"));
  }
  if (j.contains("filter_mode")) {
    if (!j.at("filter_mode").is_string()) throw ValidationError("filter_mode must be a string");
    cfg.tracker.filter_mode = parse_filter_mode(j.at("filter_mode").get<std::string>());
  }
  if (j.contains("initial_positions")) {
    const auto& sets = j.at("initial_positions");
    if (!sets.is_array()) throw ValidationError("initial_positions must be an array");
    cfg.initial_positions.clear();
    for (const auto& p : sets) {
      if (p.is_array() && p.size() == 2 && p[0].is_number_integer() && p[1].is_number_integer()) {
        cfg.initial_positions.push_back({p[0].get<int>(), p[1].get<int>()});
      } else if (p.is_object() && p.contains("pos_a") && p.contains("pos_b") &&
                 p["pos_a"].is_number_integer() && p["pos_b"].is_number_integer()) {
        cfg.initial_positions.push_back({p["pos_a"].get<int>(), p["pos_b"].get<int>()});
      } else {
        throw ValidationError("initial_positions entries are [pos_a, pos_b]");
      }
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace setscope
