#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "setscope/errors.hpp"
#include "setscope/geometry.hpp"
#include "setscope/rotation.hpp"
#include "setscope/track.hpp"

namespace setscope {

enum class TacticLabel { Quick, ThirtyOne, BackOne, Short, Outside, Bic, DBall, Oppo, Unknown };

inline constexpr std::array<TacticLabel, 9> kAllLabels{
    TacticLabel::Quick,   TacticLabel::ThirtyOne, TacticLabel::BackOne,
    TacticLabel::Short,   TacticLabel::Outside,   TacticLabel::Bic,
    TacticLabel::DBall,   TacticLabel::Oppo,      TacticLabel::Unknown};

/// The eight concrete tactics (everything but Unknown).
inline constexpr std::array<TacticLabel, 8> kTactics{
    TacticLabel::Quick, TacticLabel::ThirtyOne, TacticLabel::BackOne, TacticLabel::Short,
    TacticLabel::Outside, TacticLabel::Bic, TacticLabel::DBall, TacticLabel::Oppo};

inline std::string_view to_string(TacticLabel label) {
  switch (label) {
    case TacticLabel::Quick: return "Quick";
    case TacticLabel::ThirtyOne: return "ThirtyOne";
    case TacticLabel::BackOne: return "BackOne";
    case TacticLabel::Short: return "Short";
    case TacticLabel::Outside: return "Outside";
    case TacticLabel::Bic: return "Bic";
    case TacticLabel::DBall: return "DBall";
    case TacticLabel::Oppo: return "Oppo";
    case TacticLabel::Unknown: return "Unknown";
  }
  return "Unknown";
}

inline TacticLabel parse_tactic(std::string_view text) {
  for (TacticLabel l : kAllLabels) {
    if (to_string(l) == text) return l;
  }
  throw ValidationError("unknown tactic '" + std::string(text) + "'");
}

inline std::size_t label_index(TacticLabel label) { return static_cast<std::size_t>(label); }

/// Features of a setting trajectory, in court-view pixels.
struct TrajectoryFeatures {
  double sp = 0.0;   // setter x: mean of the first three points
  double hp = 0.0;   // hitter x: mean of the last three points
  double hya = 0.0;  // mean y of the five highest points
  double xd = 0.0;   // hp - sp
  double nw = 0.0;   // uny - lny
  // Auxiliary, not used by the rules: mean y of the first / last three points.
  double setter_height = 0.0;
  double hitter_height = 0.0;
};

/// Receiving team and each opposite's back-row status for the round.
struct SetContext {
  Team tr = Team::B;
  bool bra = false;
  bool brb = false;
};

inline TrajectoryFeatures compute_features(const Trajectory& set, const NetCalibration& cal) {
  if (set.is_sentinel()) {
    throw ValidationError("compute_features: no setting trajectory in this round");
  }
  const auto& pts = set.points;
  if (pts.size() < 5) {
    throw ValidationError("compute_features: need at least five points");
  }
  auto mean_of = [](auto first, auto last, auto proj) {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = first; it != last; ++it, ++n) sum += proj(*it);
    return sum / static_cast<double>(n);
  };
  auto x_of = [](const Point2& p) { return p.x; };
  auto y_of = [](const Point2& p) { return p.y; };

  TrajectoryFeatures f;
  f.sp = mean_of(pts.begin(), pts.begin() + 3, x_of);
  f.hp = mean_of(pts.end() - 3, pts.end(), x_of);
  f.setter_height = mean_of(pts.begin(), pts.begin() + 3, y_of);
  f.hitter_height = mean_of(pts.end() - 3, pts.end(), y_of);

  std::vector<double> ys;
  ys.reserve(pts.size());
  for (const auto& p : pts) ys.push_back(p.y);
  std::partial_sort(ys.begin(), ys.begin() + 5, ys.end(), std::greater<>());
  f.hya = (ys[0] + ys[1] + ys[2] + ys[3] + ys[4]) / 5.0;

  f.xd = f.hp - f.sp;
  f.nw = cal.net_width();
  return f;
}

namespace detail {

// Rule chain for a possession on team B's side of the x axis.
inline TacticLabel classify_team_b(double sp, double hp, double hya, double nw,
                                   const CourtSections& sec, const TacticCoefficients& coef,
                                   double span, bool back_row) {
  const double xd = hp - sp;
  const double mid12 = sec.p1 + (sec.p2 - sec.p1) / 2.0;
  const double mid34 = sec.p3 + (sec.p4 - sec.p3) / 2.0;

  if (xd > 0.0 && xd <= span / 5.0 && hya > coef.q * nw) {
    return TacticLabel::Quick;
  }
  if (xd > span / 2.0 && xd <= 3.0 * span / 2.0 && hp > 1.5 * sec.p1 && hp < sec.p4 &&
      hya > coef.m * nw) {
    return TacticLabel::ThirtyOne;
  }
  if (xd < 0.0 && std::abs(xd) <= span / 3.0 && hya > coef.q * nw) {
    return TacticLabel::BackOne;
  }
  if (sp < sec.p3 && sp > sec.p1 && hp > sec.p3 && hp < sec.p4 && hya > coef.s * nw) {
    return TacticLabel::Short;
  }
  if (hp > mid34) {
    return TacticLabel::Outside;
  }
  if (hp > mid12 && hp < mid34 && hya < coef.c * nw) {
    return TacticLabel::Bic;
  }
  if (hp < mid12) {
    return back_row ? TacticLabel::DBall : TacticLabel::Oppo;
  }
  return TacticLabel::Unknown;
}

}  // namespace detail

/// Classifies a set from its features. The first matching rule wins:
/// Quick, ThirtyOne, BackOne, Short, Outside, Bic, then DBall/Oppo split on
/// the receiving team's back-row flag, else Unknown. Team A possessions are
/// evaluated with x reflected about the net midline.
inline TacticLabel classify(const TrajectoryFeatures& f, const CourtSections& sec,
                            const TacticCoefficients& coef, const SetContext& ctx,
                            const NetCalibration& cal) {
  const double span = cal.net_span();
  if (ctx.tr == Team::B) {
    return detail::classify_team_b(f.sp, f.hp, f.hya, f.nw, sec, coef, span, ctx.brb);
  }
  return detail::classify_team_b(cal.mirror_x(f.sp), cal.mirror_x(f.hp), f.hya, f.nw, sec, coef,
                                 span, ctx.bra);
}

}  // namespace setscope
