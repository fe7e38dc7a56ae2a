#pragma once

#include <cmath>
#include <string>

#include "setscope/errors.hpp"

namespace setscope {

/// A 2D position in pixels. Past ingestion every point is in court-view
/// coordinates: x grows rightward, y grows upward from the bottom edge.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Flips an image-coordinate point (y down) into court-view (y up), and back.
inline Point2 to_court_view(const Point2& p, double frame_height) {
  return {p.x, frame_height - p.y};
}

/// Net extremes in court-view coordinates.
struct NetCalibration {
  double lnx = 0.0;  // left end of the net
  double rnx = 0.0;  // right end of the net
  double uny = 0.0;  // top of the net
  double lny = 0.0;  // bottom of the net
  double frame_height = 0.0;
  double frame_width = 0.0;

  /// Builds a calibration from operator-entered image coordinates
  /// (y measured downward from the top edge).
  static NetCalibration from_image(double lnx, double rnx, double uny_image, double lny_image,
                                   double frame_height, double frame_width) {
    NetCalibration cal{lnx, rnx, frame_height - uny_image, frame_height - lny_image,
                       frame_height, frame_width};
    cal.validate();
    return cal;
  }

  double net_span() const { return rnx - lnx; }

  /// Vertical extent of the net. Named "net width" by convention in the tactic rules.
  double net_width() const { return uny - lny; }

  double mirror_x(double x) const { return lnx + rnx - x; }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(lnx) || !finite(rnx) || !finite(uny) || !finite(lny) || !finite(frame_height) ||
        !finite(frame_width)) {
      throw ValidationError("calibration: values must be finite");
    }
    if (!(lnx < rnx)) {
      throw ValidationError("calibration: lnx must be less than rnx");
    }
    if (!(uny > lny)) {
      throw ValidationError("calibration: net top must be above net bottom");
    }
    if (frame_height <= 0.0 || frame_width <= 0.0) {
      throw ValidationError("calibration: frame dimensions must be positive");
    }
    if (lnx < 0.0 || rnx > frame_width) {
      throw ValidationError("calibration: net x-extremes must lie inside the frame");
    }
    if (lny < 0.0 || uny > frame_height) {
      throw ValidationError("calibration: net y-extremes must lie inside the frame");
    }
  }
};

/// The four interior boundaries splitting [lnx, rnx] into five equal sections.
struct CourtSections {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
};

inline CourtSections calculate_areas(double lnx, double rnx) {
  if (!(lnx < rnx)) {
    throw ValidationError("calculate_areas: lnx must be less than rnx");
  }
  const double step = (rnx - lnx) / 5.0;
  return {lnx + step, lnx + 2.0 * step, lnx + 3.0 * step, lnx + 4.0 * step};
}

inline CourtSections calculate_areas(const NetCalibration& cal) {
  return calculate_areas(cal.lnx, cal.rnx);
}

/// Height gates of the tactic rules, as multiples of the net width.
/// No in-code defaults: values always come from configuration.
struct TacticCoefficients {
  double q;  // quick / back-one
  double m;  // thirty-one
  double s;  // short
  double c;  // bic (upper bound)

  void validate() const {
    for (double v : {q, m, s, c}) {
      if (!std::isfinite(v) || v <= 0.0) {
        throw ValidationError("coefficients: q, m, s, c must be strictly positive");
      }
    }
  }
};

}  // namespace setscope
