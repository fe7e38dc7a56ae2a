#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setscope/config.hpp"
#include "setscope/detection.hpp"
#include "setscope/errors.hpp"
#include "setscope/pipeline.hpp"
#include "setscope/rotation.hpp"

namespace setscope {

struct BatchEntry {
  std::string file;
  RoundResult result;
};

struct BatchReport {
  FilterMode mode = FilterMode::Plus;
  std::vector<BatchEntry> rounds;
  TacticDistribution distribution;
  std::vector<std::string> warnings;  // skipped files
  std::vector<std::string> errors;    // files that could not be processed

  bool ok() const { return errors.empty(); }
};

/// Round key from a file name: the part before the first '.', e.g.
/// "3_2_a.ndjson" -> 3_2_a.
inline RoundKey round_key_from_filename(const std::string& name) {
  return parse_round_key(name.substr(0, name.find('.')));
}

/// Processes every `score_round_team.*` stream in `dir` in (score, round)
/// order as one set. Files whose names do not parse are skipped with a
/// warning; unreadable or malformed streams are reported as errors and do
/// not advance the rotation state.
inline BatchReport process_batch(const std::filesystem::path& dir, const EngineConfig& cfg,
                                 FilterMode mode) {
  if (!std::filesystem::is_directory(dir)) {
    throw NotFoundError("batch: no such directory " + dir.string());
  }
  BatchReport report;
  report.mode = mode;

  struct Item {
    RoundKey key;
    std::filesystem::path path;
  };
  std::vector<Item> items;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    try {
      items.push_back({round_key_from_filename(name), entry.path()});
    } catch (const FormatError& e) {
      report.warnings.push_back("skipped " + name + ": " + e.what());
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (const auto c = compare_in_set(a.key, b.key); c != 0) return c < 0;
    return a.path.filename() < b.path.filename();
  });
  std::sort(report.warnings.begin(), report.warnings.end());

  MatchAnalyzer analyzer(cfg, mode);
  std::optional<RoundKey> last;
  for (const auto& item : items) {
    const std::string name = item.path.filename().string();
    if (last && compare_in_set(item.key, *last) == 0) {
      report.errors.push_back(name + ": duplicate round " + item.key.str());
      continue;
    }
    try {
      std::ifstream in(item.path);
      if (!in) throw Error("cannot open file");
      const auto records = read_detection_stream(in, cfg.calibration.frame_height);
      const RoundResult result = analyzer.analyze(item.key, records);
      report.distribution.add(result);
      report.rounds.push_back({name, result});
      last = item.key;
    } catch (const Error& e) {
      report.errors.push_back(name + ": " + e.what());
    }
  }
  return report;
}

inline nlohmann::json to_json(const BatchReport& r) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& e : r.rounds) {
    nlohmann::json j = to_json(e.result);
    j["file"] = e.file;
    rounds.push_back(std::move(j));
  }
  return {{"mode", to_string(r.mode)},
          {"rounds", rounds},
          {"distribution", to_json(r.distribution)},
          {"warnings", r.warnings},
          {"errors", r.errors}};
}

}  // namespace setscope
