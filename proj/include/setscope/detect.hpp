#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "setscope/detection.hpp"
#include "setscope/errors.hpp"
#include "setscope/image.hpp"

namespace setscope {

/// One decoded grayscale video frame.
struct Frame {
  GrayImage pixels;
  std::int64_t index = 0;
  double timestamp = 0.0;
};

// ---------------------------------------------------------------------------
// Gaussian blur

/// Normalized 1D Gaussian taps for radius ceil(3*sigma). The outer product of
/// this kernel with itself is the 2D Gaussian truncated to a square window and
/// renormalized to unit mass.
inline std::vector<double> gaussian_kernel_1d(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gaussian_blur: sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    taps[i + radius] = w;
    sum += w;
  }
  for (auto& w : taps) {
    w /= sum;
  }
  return taps;
}

/// Separable Gaussian blur with clamp-to-edge borders. Integral pixel types
/// are rounded and saturated on output.
template <typename T>
Image<T> gaussian_blur(const Image<T>& src, double sigma) {
  const auto taps64 = gaussian_kernel_1d(sigma);
  const std::vector<float> taps(taps64.begin(), taps64.end());
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = src.width();
  const int h = src.height();
  Image<float> horiz(w, h);
  std::vector<float> padded(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < h; ++y) {
    const auto in = src.row(y);
    for (int i = 0; i < w + 2 * radius; ++i) {
      padded[i] = static_cast<float>(in[std::clamp(i - radius, 0, w - 1)]);
    }
    auto out = horiz.row(y);
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int k = 0; k <= 2 * radius; ++k) {
        acc += taps[k] * padded[x + k];
      }
      out[x] = acc;
    }
  }
  Image<T> dst(w, h);
  std::vector<float> acc(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    for (int k = -radius; k <= radius; ++k) {
      const auto in = horiz.row(std::clamp(y + k, 0, h - 1));
      const float tap = taps[k + radius];
      for (int x = 0; x < w; ++x) {
        acc[x] += tap * in[x];
      }
    }
    auto out = dst.row(y);
    for (int x = 0; x < w; ++x) {
      if constexpr (std::is_integral_v<T>) {
        const float lo = static_cast<float>(std::numeric_limits<T>::min());
        const float hi = static_cast<float>(std::numeric_limits<T>::max());
        out[x] = static_cast<T>(std::clamp(std::nearbyint(acc[x]), lo, hi));
      } else {
        out[x] = static_cast<T>(acc[x]);
      }
    }
  }
  return dst;
}

/// Default blur sigma: 2 px at 1280 px width, scaled linearly with width.
inline double default_blur_sigma(int frame_width) { return 2.0 * frame_width / 1280.0; }

// ---------------------------------------------------------------------------
// Background subtraction

/// Running-average background with a per-pixel absolute-difference threshold.
struct BackgroundModel {
  Image<float> mean;
  double learning_rate = 0.05;
  double threshold = 25.0;

  static BackgroundModel from_frame(const GrayImage& frame, double learning_rate = 0.05,
                                    double threshold = 25.0) {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
      throw ValidationError("background: learning rate must be in (0, 1]");
    }
    Image<float> mean(frame.width(), frame.height());
    std::transform(frame.pixels().begin(), frame.pixels().end(), mean.pixels().begin(),
                   [](std::uint8_t v) { return static_cast<float>(v); });
    return {std::move(mean), learning_rate, threshold};
  }
};

struct SubtractionResult {
  Mask mask;
  BackgroundModel model;
};

/// Marks pixels farther than the threshold from the current mean, then folds
/// the frame into the mean: mean' = (1 - rate) * mean + rate * frame.
template <typename T>
SubtractionResult background_subtract(const Image<T>& frame, BackgroundModel model) {
  if (!frame.same_shape(model.mean)) {
    throw ValidationError("background_subtract: frame and model dimensions differ");
  }
  Mask mask(frame.width(), frame.height());
  const auto in = frame.pixels();
  auto mean = model.mean.pixels();
  auto out = mask.pixels();
  const float rate = static_cast<float>(model.learning_rate);
  const float keep = 1.0f - rate;
  const float threshold = static_cast<float>(model.threshold);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float v = static_cast<float>(in[i]);
    out[i] = std::abs(v - mean[i]) > threshold ? 1 : 0;
    mean[i] = keep * mean[i] + rate * v;
  }
  return {std::move(mask), std::move(model)};
}

// ---------------------------------------------------------------------------
// Binary morphology with a (2r+1)x(2r+1) square structuring element.
// Out-of-frame pixels are ignored, which keeps erosion and dilation adjoint
// so opening stays anti-extensive and closing extensive at the borders.

namespace detail {

// Horizontal pass over one row. With erode=true a pixel survives iff every
// in-frame pixel of its window is set; otherwise it is set iff any of them is.
inline void morph_row(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int radius,
                      bool erode) {
  const int count = static_cast<int>(in.size());
  int set = 0;
  int lo = 0;
  int hi = -1;  // window [lo, hi] currently summed
  for (int i = 0; i < count; ++i) {
    const int want_lo = std::max(0, i - radius);
    const int want_hi = std::min(count - 1, i + radius);
    while (hi < want_hi) {
      ++hi;
      set += in[hi];
    }
    while (lo < want_lo) {
      set -= in[lo];
      ++lo;
    }
    const int len = hi - lo + 1;
    out[i] = erode ? (set == len ? 1 : 0) : (set > 0 ? 1 : 0);
  }
}

inline Mask morph_square(const Mask& src, int radius, bool erode) {
  if (radius < 0) {
    throw ValidationError("morphology: radius must be non-negative");
  }
  if (radius == 0 || src.empty()) {
    return src;
  }
  const int w = src.width();
  const int h = src.height();
  Mask tmp(w, h);
  for (int y = 0; y < h; ++y) {
    morph_row(src.row(y), tmp.row(y), radius, erode);
  }
  // Vertical pass: same sliding window, one running count per column.
  Mask dst(w, h);
  std::vector<int> set(static_cast<std::size_t>(w), 0);
  int lo = 0;
  int hi = -1;
  for (int y = 0; y < h; ++y) {
    const int want_lo = std::max(0, y - radius);
    const int want_hi = std::min(h - 1, y + radius);
    while (hi < want_hi) {
      const auto row = tmp.row(++hi);
      for (int x = 0; x < w; ++x) set[x] += row[x];
    }
    while (lo < want_lo) {
      const auto row = tmp.row(lo++);
      for (int x = 0; x < w; ++x) set[x] -= row[x];
    }
    const int len = hi - lo + 1;
    auto out = dst.row(y);
    for (int x = 0; x < w; ++x) {
      out[x] = erode ? (set[x] == len ? 1 : 0) : (set[x] > 0 ? 1 : 0);
    }
  }
  return dst;
}

}  // namespace detail

inline Mask erode(const Mask& mask, int radius) { return detail::morph_square(mask, radius, true); }
inline Mask dilate(const Mask& mask, int radius) {
  return detail::morph_square(mask, radius, false);
}
inline Mask morph_open(const Mask& mask, int radius) { return dilate(erode(mask, radius), radius); }
inline Mask morph_close(const Mask& mask, int radius) { return erode(dilate(mask, radius), radius); }

/// Opening removes specks smaller than the element, closing bridges small gaps.
inline Mask morph_clean(const Mask& mask, int open_radius, int close_radius) {
  return morph_close(morph_open(mask, open_radius), close_radius);
}

// ---------------------------------------------------------------------------
// Connected components

namespace detail {

// (dx, dy) clockwise on screen, starting east.
inline constexpr std::array<std::array<int, 2>, 8> kRing{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

inline int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i][0] == dx && kRing[i][1] == dy) {
      return i;
    }
  }
  return -1;
}

// Moore-neighbour tracing of the outer boundary of the component holding
// `start`, which must be its first pixel in raster order. Returns the length
// of the traced pixel-centre polygon (diagonal steps count sqrt(2)).
inline double trace_perimeter(const Image<std::int32_t>& labels, int sx, int sy,
                              std::size_t area) {
  const std::int32_t label = labels(sx, sy);
  auto inside = [&](int x, int y) { return labels.contains(x, y) && labels(x, y) == label; };

  struct Step {
    int x, y, bx, by;
    bool found;
  };
  // Sweep clockwise around (px, py) starting at the backtrack neighbour.
  auto next = [&](int px, int py, int bx, int by) -> Step {
    const int first = ring_index(bx - px, by - py);
    int prev_x = bx;
    int prev_y = by;
    for (int k = 0; k < 8; ++k) {
      const auto& d = kRing[(first + k) % 8];
      const int nx = px + d[0];
      const int ny = py + d[1];
      if (inside(nx, ny)) {
        return {nx, ny, prev_x, prev_y, true};
      }
      prev_x = nx;
      prev_y = ny;
    }
    return {px, py, bx, by, false};
  };
  auto step_len = [](int ax, int ay, int bx, int by) {
    return (ax != bx && ay != by) ? std::numbers::sqrt2 : 1.0;
  };

  const Step first = next(sx, sy, sx - 1, sy);
  if (!first.found) {
    return 0.0;
  }
  double perimeter = step_len(sx, sy, first.x, first.y);
  int px = first.x, py = first.y, bx = first.bx, by = first.by;
  const std::size_t limit = 8 * area + 16;
  for (std::size_t guard = 0; guard < limit; ++guard) {
    const Step s = next(px, py, bx, by);
    if (px == sx && py == sy && s.x == first.x && s.y == first.y) {
      break;
    }
    perimeter += step_len(px, py, s.x, s.y);
    px = s.x;
    py = s.y;
    bx = s.bx;
    by = s.by;
  }
  return perimeter;
}

}  // namespace detail

/// One region per 8-connected foreground component, in raster order of each
/// component's first pixel. Scores are left at zero for the scorer to fill.
inline std::vector<CandidateRegion> find_contours(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Image<std::int32_t> labels(w, h, -1);
  std::vector<CandidateRegion> regions;
  std::vector<std::array<int, 2>> stack;
  std::int32_t next_label = 0;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (mask(x0, y0) == 0 || labels(x0, y0) >= 0) {
        continue;
      }
      const std::int32_t label = next_label++;
      std::size_t count = 0;
      double sum_x = 0.0;
      double sum_y = 0.0;
      int min_x = x0, max_x = x0, min_y = y0, max_y = y0;
      labels(x0, y0) = label;
      stack.push_back({x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++count;
        sum_x += x;
        sum_y += y;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        for (const auto& d : detail::kRing) {
          const int nx = x + d[0];
          const int ny = y + d[1];
          if (mask.contains(nx, ny) && mask(nx, ny) != 0 && labels(nx, ny) < 0) {
            labels(nx, ny) = label;
            stack.push_back({nx, ny});
          }
        }
      }
      CandidateRegion region;
      region.area = static_cast<double>(count);
      region.centroid = {sum_x / count, sum_y / count};
      region.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      const double perimeter = detail::trace_perimeter(labels, x0, y0, count);
      region.circularity =
          perimeter > 0.0
              ? std::clamp(4.0 * std::numbers::pi * region.area / (perimeter * perimeter), 0.0, 1.0)
              : 0.0;
      regions.push_back(region);
    }
  }
  return regions;
}

// ---------------------------------------------------------------------------
// Candidate scoring

/// Replaceable ball/not-ball scorer. A learned model plugs in here.
class CandidateScorer {
 public:
  virtual ~CandidateScorer() = default;
  virtual double score(const CandidateRegion& region, const GrayImage& frame) const = 0;
};

/// 1 inside [min_area, max_area], falling linearly to 0 at half the lower
/// edge and at twice the upper edge.
inline double area_band_factor(double area, double min_area, double max_area) {
  if (area >= min_area && area <= max_area) {
    return 1.0;
  }
  if (area < min_area) {
    const double lo = 0.5 * min_area;
    return std::clamp((area - lo) / (min_area - lo), 0.0, 1.0);
  }
  const double hi = 2.0 * max_area;
  return std::clamp((hi - area) / (hi - max_area), 0.0, 1.0);
}

class GeometricScorer final : public CandidateScorer {
 public:
  GeometricScorer(double min_area, double max_area) : min_area_(min_area), max_area_(max_area) {
    if (!(min_area > 0.0 && min_area < max_area)) {
      throw ValidationError("scorer: need 0 < min_area < max_area");
    }
  }

  double score(const CandidateRegion& region, const GrayImage&) const override {
    return std::clamp(region.circularity, 0.0, 1.0) *
           area_band_factor(region.area, min_area_, max_area_);
  }

  double min_area() const { return min_area_; }
  double max_area() const { return max_area_; }

 private:
  double min_area_;
  double max_area_;
};

// ---------------------------------------------------------------------------
// Full preprocessing chain

struct DetectorConfig {
  std::optional<double> sigma;  // default scales with frame width
  double learning_rate = 0.05;
  double threshold = 25.0;
  int open_radius = 1;
  int close_radius = 1;
  std::optional<double> min_area;  // default band [40, 1200] px^2 at 1280x720
  std::optional<double> max_area;
  int max_candidates = 12;
};

struct DetectorParams {
  double sigma;
  double learning_rate;
  double threshold;
  int open_radius;
  int close_radius;
  double min_area;
  double max_area;
  int max_candidates;

  static DetectorParams resolve(const DetectorConfig& cfg, int frame_width, int frame_height) {
    const double area_scale = (double(frame_width) * frame_height) / (1280.0 * 720.0);
    DetectorParams p{cfg.sigma.value_or(default_blur_sigma(frame_width)),
                     cfg.learning_rate,
                     cfg.threshold,
                     cfg.open_radius,
                     cfg.close_radius,
                     cfg.min_area.value_or(40.0 * area_scale),
                     cfg.max_area.value_or(1200.0 * area_scale),
                     cfg.max_candidates};
    if (p.max_candidates <= 0) {
      throw ValidationError("detector: max_candidates must be positive");
    }
    if (!(p.sigma > 0.0)) throw ValidationError("detector: sigma must be positive");
    if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
      throw ValidationError("detector: learning_rate must be in (0, 1]");
    }
    if (p.open_radius < 0 || p.close_radius < 0) {
      throw ValidationError("detector: morphology radii must be non-negative");
    }
    if (!(p.min_area > 0.0 && p.min_area < p.max_area)) {
      throw ValidationError("detector: need 0 < min_area < max_area");
    }
    return p;
  }
};

/// Blur, background subtraction, morphology, contours and scoring over a
/// clip. Frames must be fed in order; the first frame seeds the background.
/// Output records are in image coordinates.
class Detector {
 public:
  explicit Detector(DetectorParams params, std::shared_ptr<const CandidateScorer> scorer = nullptr)
      : params_(params),
        scorer_(scorer ? std::move(scorer)
                       : std::make_shared<GeometricScorer>(params.min_area, params.max_area)) {}

  DetectionRecord process(const Frame& frame) {
    if (last_index_ && frame.index <= *last_index_) {
      throw OrderError("detector: frame indices must increase");
    }
    last_index_ = frame.index;
    DetectionRecord record{frame.index, {}};
    const GrayImage smooth = gaussian_blur(frame.pixels, params_.sigma);
    if (!model_) {
      model_ = BackgroundModel::from_frame(smooth, params_.learning_rate, params_.threshold);
      return record;
    }
    auto [mask, model] = background_subtract(smooth, std::move(*model_));
    model_ = std::move(model);
    const Mask clean = morph_clean(mask, params_.open_radius, params_.close_radius);
    auto regions = find_contours(clean);
    for (auto& r : regions) {
      r.score = scorer_->score(r, frame.pixels);
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    if (regions.size() > static_cast<std::size_t>(params_.max_candidates)) {
      regions.resize(static_cast<std::size_t>(params_.max_candidates));
    }
    record.candidates = std::move(regions);
    return record;
  }

  const DetectorParams& params() const { return params_; }

 private:
  DetectorParams params_;
  std::shared_ptr<const CandidateScorer> scorer_;
  std::optional<BackgroundModel> model_;
  std::optional<std::int64_t> last_index_;
};

}  // namespace setscope
