#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "setscope/detection.hpp"
#include "setscope/errors.hpp"
#include "setscope/geometry.hpp"

namespace setscope {

enum class MovementStatus { Still, DirectedMoving };

/// Which trajectory-validity rule the tracker applies.
/// Baseline: last-three-points direction consistency.
/// Plus: majority trend of x over the whole path.
enum class FilterMode { Baseline, Plus };

inline std::string to_string(FilterMode mode) {
  return mode == FilterMode::Baseline ? "baseline" : "plus";
}

inline FilterMode parse_filter_mode(const std::string& text) {
  if (text == "baseline") return FilterMode::Baseline;
  if (text == "plus") return FilterMode::Plus;
  throw ValidationError("unknown filter mode '" + text + "' (expected baseline|plus)");
}

inline std::string to_string(MovementStatus status) {
  return status == MovementStatus::Still ? "still" : "directed_moving";
}

/// A tracked moving-object hypothesis. `pts` only ever grows at the back.
struct Blob {
  std::uint64_t id = 0;
  std::vector<Point2> pts;
  std::vector<std::int64_t> frames;  // frame index of each entry in pts
  MovementStatus status = MovementStatus::Still;
  std::int64_t last_update_frame = 0;
  bool finalized = false;
};

// ---------------------------------------------------------------------------
// Motion prediction

/// Least-squares line through (t_i, p_i), evaluated at `at`. Needs >= 2
/// samples with distinct times.
inline Point2 extrapolate_linear(std::span<const Point2> pts, std::span<const double> t,
                                 double at) {
  const std::size_t n = pts.size();
  if (n < 2 || t.size() != n) {
    throw ValidationError("extrapolate_linear: need at least two timed samples");
  }
  double mean_t = 0.0, mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_t += t[i];
    mean_x += pts[i].x;
    mean_y += pts[i].y;
  }
  mean_t /= n;
  mean_x /= n;
  mean_y /= n;
  double stt = 0.0, stx = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i] - mean_t;
    stt += dt * dt;
    stx += dt * (pts[i].x - mean_x);
    sty += dt * (pts[i].y - mean_y);
  }
  if (stt <= 0.0) {
    throw ValidationError("extrapolate_linear: sample times must differ");
  }
  return {mean_x + stx / stt * (at - mean_t), mean_y + sty / stt * (at - mean_t)};
}

/// Constant-velocity guess one step past the last point, from a line fitted
/// to the final (up to) three points against their sample index.
inline Point2 predict_next(std::span<const Point2> pts) {
  if (pts.size() < 2) {
    throw ValidationError("predict_next: need at least two points");
  }
  const std::size_t k = std::min<std::size_t>(3, pts.size());
  const auto tail = pts.subspan(pts.size() - k);
  std::vector<double> t(k);
  for (std::size_t i = 0; i < k; ++i) {
    t[i] = static_cast<double>(i);
  }
  return extrapolate_linear(tail, t, static_cast<double>(k));
}

inline Point2 predict_next(const Blob& blob) { return predict_next(std::span(blob.pts)); }

/// Predicted position at an arbitrary frame, using the frame indices of the
/// last three points so missed frames are bridged at constant velocity.
inline Point2 predict_at_frame(const Blob& blob, std::int64_t frame) {
  if (blob.pts.size() < 2) {
    return blob.pts.back();
  }
  const std::size_t k = std::min<std::size_t>(3, blob.pts.size());
  const std::size_t start = blob.pts.size() - k;
  std::vector<double> t(k);
  for (std::size_t i = 0; i < k; ++i) {
    t[i] = static_cast<double>(blob.frames[start + i]);
  }
  return extrapolate_linear(std::span(blob.pts).subspan(start), t, static_cast<double>(frame));
}

// ---------------------------------------------------------------------------
// Status rules

/// Baseline rule over the newest three points: Still when the last step is
/// shorter than `still_threshold`, DirectedMoving when both x and y kept their
/// direction over the last two steps, Still otherwise.
inline MovementStatus update_status_baseline(std::span<const Point2> pts, double still_threshold) {
  if (pts.size() < 3) {
    return MovementStatus::Still;
  }
  const Point2& p0 = pts[pts.size() - 1];
  const Point2& p1 = pts[pts.size() - 2];
  const Point2& p2 = pts[pts.size() - 3];
  if (distance(p0, p1) < still_threshold) {
    return MovementStatus::Still;
  }
  const double dx1 = p0.x - p1.x;
  const double dx2 = p1.x - p2.x;
  const double dy1 = p0.y - p1.y;
  const double dy2 = p1.y - p2.y;
  return (dx1 * dx2 > 0.0 && dy1 * dy2 > 0.0) ? MovementStatus::DirectedMoving
                                               : MovementStatus::Still;
}

namespace detail {

struct DiffCounts {
  std::size_t negative = 0;
  std::size_t positive = 0;
  std::size_t total = 0;
};

inline DiffCounts count_x_diffs(std::span<const Point2> pts) {
  DiffCounts c;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].x - pts[i - 1].x;
    c.negative += dx < 0.0;
    c.positive += dx > 0.0;
    ++c.total;
  }
  return c;
}

}  // namespace detail

/// True iff strictly more than half of the consecutive x-differences are
/// negative. Zero differences count toward neither side.
inline bool evaluate_x_decrease(std::span<const Point2> pts) {
  if (pts.size() < 2) {
    return false;
  }
  const auto c = detail::count_x_diffs(pts);
  return 2 * c.negative > c.total;
}

inline bool evaluate_x_increase(std::span<const Point2> pts) {
  if (pts.size() < 2) {
    return false;
  }
  const auto c = detail::count_x_diffs(pts);
  return 2 * c.positive > c.total;
}

inline bool plus_filter_valid(std::span<const Point2> pts) {
  return evaluate_x_decrease(pts) || evaluate_x_increase(pts);
}

inline MovementStatus evaluate_status(std::span<const Point2> pts, FilterMode mode,
                                      double still_threshold) {
  if (mode == FilterMode::Baseline) {
    return update_status_baseline(pts, still_threshold);
  }
  return plus_filter_valid(pts) ? MovementStatus::DirectedMoving : MovementStatus::Still;
}

// ---------------------------------------------------------------------------
// Tracker

struct TrackerConfig {
  double still_threshold = 5.0;
  std::optional<double> association_radius;  // default 60 px at 1280 px width
  int max_coast_frames = 3;
  double spawn_score_floor = 0.3;
  FilterMode filter_mode = FilterMode::Plus;

  double resolved_radius(double frame_width) const {
    return association_radius.value_or(60.0 * frame_width / 1280.0);
  }
};

struct TrackerState {
  std::vector<Blob> blobs;  // ordered by id (creation order), finalized ones included
  std::uint64_t next_id = 1;
  double still_threshold = 5.0;
  double association_radius = 60.0;
  int max_coast_frames = 3;
  double spawn_score_floor = 0.3;
  FilterMode filter_mode = FilterMode::Plus;
  std::optional<std::int64_t> last_frame;

  static TrackerState from_config(const TrackerConfig& cfg, double frame_width) {
    TrackerState s;
    s.still_threshold = cfg.still_threshold;
    s.association_radius = cfg.resolved_radius(frame_width);
    s.max_coast_frames = cfg.max_coast_frames;
    s.spawn_score_floor = cfg.spawn_score_floor;
    s.filter_mode = cfg.filter_mode;
    s.validate();
    return s;
  }

  void validate() const {
    if (!(still_threshold > 0.0)) {
      throw ValidationError("tracker: still_threshold must be positive");
    }
    if (!(association_radius > 0.0)) {
      throw ValidationError("tracker: association_radius must be positive");
    }
    if (max_coast_frames < 0) {
      throw ValidationError("tracker: max_coast_frames must be non-negative");
    }
  }
};

/// Advances the tracker by one frame of (court-view) detections.
///
/// Blobs that have missed more than `max_coast_frames` frames are finalized
/// first. Remaining blobs are matched to candidates greedily, closest
/// predicted-position/candidate pair first, each used at most once, pairs
/// beyond `association_radius` never matched. Unmatched candidates scoring at
/// least `spawn_score_floor` start new blobs.
inline TrackerState associate(TrackerState state, const DetectionRecord& record) {
  const std::int64_t frame = record.frame_index;
  if (state.last_frame && frame <= *state.last_frame) {
    throw OrderError("associate: frame " + std::to_string(frame) + " is not after frame " +
                     std::to_string(*state.last_frame));
  }
  state.last_frame = frame;

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < state.blobs.size(); ++i) {
    Blob& b = state.blobs[i];
    if (b.finalized) {
      continue;
    }
    const std::int64_t missed = frame - b.last_update_frame - 1;
    if (missed > state.max_coast_frames) {
      b.finalized = true;
      continue;
    }
    active.push_back(i);
  }

  struct Pair {
    double dist;
    std::uint64_t blob_id;
    std::size_t blob;
    std::size_t cand;
  };
  std::vector<Pair> pairs;
  for (std::size_t bi : active) {
    const Point2 guess = predict_at_frame(state.blobs[bi], frame);
    for (std::size_t ci = 0; ci < record.candidates.size(); ++ci) {
      const double d = distance(guess, record.candidates[ci].centroid);
      if (d <= state.association_radius) {
        pairs.push_back({d, state.blobs[bi].id, bi, ci});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.blob_id, a.cand) < std::tie(b.dist, b.blob_id, b.cand);
  });

  std::vector<bool> blob_used(state.blobs.size(), false);
  std::vector<bool> cand_used(record.candidates.size(), false);
  for (const Pair& p : pairs) {
    if (blob_used[p.blob] || cand_used[p.cand]) {
      continue;
    }
    blob_used[p.blob] = true;
    cand_used[p.cand] = true;
    Blob& b = state.blobs[p.blob];
    b.pts.push_back(record.candidates[p.cand].centroid);
    b.frames.push_back(frame);
    b.last_update_frame = frame;
    b.status = evaluate_status(b.pts, state.filter_mode, state.still_threshold);
  }

  for (std::size_t ci = 0; ci < record.candidates.size(); ++ci) {
    const auto& c = record.candidates[ci];
    if (cand_used[ci] || c.score < state.spawn_score_floor) {
      continue;
    }
    Blob b;
    b.id = state.next_id++;
    b.pts.push_back(c.centroid);
    b.frames.push_back(frame);
    b.last_update_frame = frame;
    b.status = evaluate_status(b.pts, state.filter_mode, state.still_threshold);
    state.blobs.push_back(std::move(b));
  }
  return state;
}

// ---------------------------------------------------------------------------
// Trajectories

/// Chronologically ordered ball positions of one blob. The sentinel marks a
/// round with no usable setting trajectory: a single (0, 0) point, invalid.
struct Trajectory {
  std::vector<Point2> points;
  std::uint64_t source_blob_id = 0;
  bool valid = true;

  static Trajectory sentinel() { return {{Point2{0.0, 0.0}}, 0, false}; }
  bool is_sentinel() const { return !valid; }
  std::size_t size() const { return points.size(); }
};

/// Trajectories of blobs the active rule accepts, in blob creation order.
/// Baseline keeps blobs whose final status is DirectedMoving; Plus keeps
/// blobs whose whole path passes the majority-trend filter.
inline std::vector<Trajectory> harvest_trajectories(const TrackerState& state) {
  std::vector<Trajectory> out;
  for (const Blob& b : state.blobs) {
    const bool keep = state.filter_mode == FilterMode::Baseline
                          ? update_status_baseline(b.pts, state.still_threshold) ==
                                MovementStatus::DirectedMoving
                          : plus_filter_valid(b.pts);
    if (keep) {
      out.push_back({b.pts, b.id, true});
    }
  }
  return out;
}

/// Paths shorter than this are treated as noise when looking for the set.
inline constexpr std::size_t kMinSettingLength = 9;

/// The last trajectory (in chronological order) with at least
/// `min_length` points, or the sentinel when there is none.
inline Trajectory extract_setting_trajectory(std::span<const Trajectory> trajectories,
                                             std::size_t min_length = kMinSettingLength) {
  for (auto it = trajectories.rbegin(); it != trajectories.rend(); ++it) {
    if (it->valid && it->points.size() >= min_length) {
      return *it;
    }
  }
  return Trajectory::sentinel();
}

/// Runs a whole round through a fresh tracker.
inline TrackerState track_round(const TrackerConfig& cfg, double frame_width,
                                std::span<const DetectionRecord> records) {
  TrackerState state = TrackerState::from_config(cfg, frame_width);
  for (const auto& r : records) {
    state = associate(std::move(state), r);
  }
  return state;
}

}  // namespace setscope
