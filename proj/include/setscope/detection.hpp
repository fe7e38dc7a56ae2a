#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setscope/errors.hpp"
#include "setscope/geometry.hpp"

namespace setscope {

struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// A potential ball region in one frame.
struct CandidateRegion {
  Point2 centroid;
  BoundingBox bbox;
  double area = 0.0;
  double circularity = 0.0;
  double score = 0.0;

  friend bool operator==(const CandidateRegion&, const CandidateRegion&) = default;
};

/// All candidates found in one frame. Unit of exchange between detection and tracking.
struct DetectionRecord {
  std::int64_t frame_index = 0;
  std::vector<CandidateRegion> candidates;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

inline DetectionRecord to_court_view(DetectionRecord record, double frame_height) {
  for (auto& c : record.candidates) {
    c.centroid = to_court_view(c.centroid, frame_height);
    // the box keeps image orientation; only its top edge moves
    c.bbox.y = static_cast<int>(frame_height) - c.bbox.y - c.bbox.h;
  }
  return record;
}

inline std::vector<DetectionRecord> to_court_view(std::vector<DetectionRecord> records,
                                                  double frame_height) {
  for (auto& r : records) {
    r = to_court_view(std::move(r), frame_height);
  }
  return records;
}

inline void validate_frame_order(const std::vector<DetectionRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].frame_index <= records[i - 1].frame_index) {
      throw OrderError("detections: frame " + std::to_string(records[i].frame_index) +
                       " does not follow frame " + std::to_string(records[i - 1].frame_index));
    }
  }
}

// ---------------------------------------------------------------------------
// Detection-stream format: newline-delimited JSON, one record per frame,
//   {"frame": <int>, "candidates": [{"x", "y", "area", "circularity", "score"}, ...]}
// with coordinates in image space (y down).

inline nlohmann::json record_to_json(const DetectionRecord& record, double frame_height) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : record.candidates) {
    const Point2 img = to_court_view(c.centroid, frame_height);
    cands.push_back({{"x", img.x},
                     {"y", img.y},
                     {"area", c.area},
                     {"circularity", c.circularity},
                     {"score", c.score}});
  }
  return {{"frame", record.frame_index}, {"candidates", std::move(cands)}};
}

/// Parses one stream record and converts it to court-view coordinates.
inline DetectionRecord record_from_json(const nlohmann::json& j, double frame_height) {
  if (!j.is_object() || !j.contains("frame") || !j.at("frame").is_number_integer()) {
    throw FormatError("record needs an integer \"frame\"");
  }
  DetectionRecord record;
  record.frame_index = j.at("frame").get<std::int64_t>();
  if (!j.contains("candidates")) {
    return record;
  }
  const auto& cands = j.at("candidates");
  if (!cands.is_array()) {
    throw FormatError("\"candidates\" must be an array");
  }
  for (const auto& c : cands) {
    auto number = [&](const char* key) -> double {
      if (!c.is_object() || !c.contains(key) || !c.at(key).is_number()) {
        throw FormatError(std::string("candidate needs a numeric \"") + key + "\"");
      }
      return c.at(key).get<double>();
    };
    CandidateRegion region;
    const Point2 img{number("x"), number("y")};
    region.area = number("area");
    region.circularity = number("circularity");
    region.score = number("score");
    if (img.x < 0.0 || img.y < 0.0 || img.y > frame_height) {
      throw FormatError("candidate position outside the frame");
    }
    region.centroid = to_court_view(img, frame_height);
    region.bbox = {static_cast<int>(region.centroid.x), static_cast<int>(region.centroid.y), 1, 1};
    record.candidates.push_back(region);
  }
  return record;
}

/// Writes court-view records as an image-coordinate detection stream.
inline void write_detection_stream(std::ostream& out, const std::vector<DetectionRecord>& records,
                                   double frame_height) {
  for (const auto& r : records) {
    out << record_to_json(r, frame_height).dump() << '\n';
  }
}

/// Reads a detection stream into court-view records. Blank lines are ignored.
/// Throws FormatError naming the line on malformed input and OrderError when
/// frame indices are not strictly increasing.
inline std::vector<DetectionRecord> read_detection_stream(std::istream& in, double frame_height) {
  std::vector<DetectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    DetectionRecord record;
    try {
      record = record_from_json(nlohmann::json::parse(line), frame_height);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!records.empty() && record.frame_index <= records.back().frame_index) {
      throw OrderError("line " + std::to_string(line_no) + ": frame " +
                       std::to_string(record.frame_index) + " is not after frame " +
                       std::to_string(records.back().frame_index));
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace setscope
