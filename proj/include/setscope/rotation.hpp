#pragma once

#include <charconv>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setscope/errors.hpp"

namespace setscope {

enum class Team { A, B };

inline Team other(Team t) { return t == Team::A ? Team::B : Team::A; }
inline char team_char(Team t) { return t == Team::A ? 'a' : 'b'; }

inline Team parse_team(std::string_view text) {
  if (text == "a" || text == "A") return Team::A;
  if (text == "b" || text == "B") return Team::B;
  throw ValidationError("unknown team '" + std::string(text) + "' (expected a|b)");
}

/// Identifies one round clip: rally number within the set, round number
/// within the rally, and the team that received serve first in the rally.
struct RoundKey {
  int score = 1;
  int round = 1;
  Team team = Team::A;

  std::string str() const {
    return std::to_string(score) + "_" + std::to_string(round) + "_" + team_char(team);
  }

  friend bool operator==(const RoundKey&, const RoundKey&) = default;
};

/// Lexicographic (score, round) order; the team label does not take part.
inline std::strong_ordering compare_in_set(const RoundKey& a, const RoundKey& b) {
  if (auto c = a.score <=> b.score; c != 0) return c;
  return a.round <=> b.round;
}

/// Parses "<score>_<round>_<a|b>", e.g. "3_2_a".
inline RoundKey parse_round_key(std::string_view name) {
  auto fail = [&]() -> RoundKey {
    throw FormatError("malformed round key '" + std::string(name) +
                      "' (expected <score>_<round>_<a|b>)");
  };
  const auto first = name.find('_');
  if (first == std::string_view::npos) return fail();
  const auto second = name.find('_', first + 1);
  if (second == std::string_view::npos) return fail();

  auto parse_int = [&](std::string_view part) -> int {
    int value = 0;
    if (part.empty()) fail();
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || end != part.data() + part.size()) fail();
    return value;
  };
  RoundKey key;
  key.score = parse_int(name.substr(0, first));
  key.round = parse_int(name.substr(first + 1, second - first - 1));
  const auto team = name.substr(second + 1);
  if (team.size() != 1) return fail();
  switch (team[0]) {
    case 'a': case 'A': key.team = Team::A; break;
    case 'b': case 'B': key.team = Team::B; break;
    default: return fail();
  }
  if (key.score < 1 || key.round < 1) {
    throw FormatError("round key '" + std::string(name) + "': score and round start at 1");
  }
  return key;
}

inline void check_position(int pos) {
  if (pos < 1 || pos > 6) {
    throw ValidationError("rotation position " + std::to_string(pos) + " is outside 1..6");
  }
}

/// One clockwise rotation step for the opposite: 2 -> 1, 1 -> 6.
inline int rotate_back(int pos) {
  check_position(pos);
  const int r = (pos - 1) % 6;
  return r == 0 ? 6 : r;
}

/// Positions 1, 5 and 6 are back row.
inline bool is_back_row(int pos) {
  check_position(pos);
  return pos == 1 || pos == 5 || pos == 6;
}

/// Current rotation position of each team's opposite hitter.
struct RotationState {
  int opp_a = 1;
  int opp_b = 1;

  void validate() const {
    check_position(opp_a);
    check_position(opp_b);
  }
  int of(Team t) const { return t == Team::A ? opp_a : opp_b; }

  friend bool operator==(const RotationState&, const RotationState&) = default;
};

struct BackRowFlags {
  std::vector<bool> back_row_a;
  std::vector<bool> back_row_b;
};

/// Incremental opposite back-row check.
///
/// Rounds must arrive in chronological order. The first round of a set uses
/// that set's initial positions. A rally boundary (score differs from the
/// previous round's) with a change of receiving team is a side-out: the
/// team now serving rotates, i.e. when the new receiver is A, B's opposite
/// steps back one position, and vice versa. A drop in score starts a new set.
class RotationTracker {
 public:
  explicit RotationTracker(std::vector<RotationState> initial_per_set)
      : initial_(std::move(initial_per_set)) {
    if (initial_.empty()) {
      throw ValidationError("rotation: initial positions required for the first set");
    }
    for (const auto& s : initial_) s.validate();
  }

  /// Positions in effect for `key`. Leaves the tracker unchanged on error.
  RotationState advance(const RoundKey& key) {
    RotationState next = state_;
    std::size_t set = set_index_;
    if (!prev_) {
      next = initial_.front();
      set = 0;
    } else if (key.score < prev_->score) {
      if (set + 1 >= initial_.size()) {
        throw ValidationError("rotation: no initial positions supplied for set " +
                              std::to_string(set + 2));
      }
      ++set;
      next = initial_[set];
    } else if (key.team != prev_->team && key.score != prev_->score) {
      if (key.team == Team::A) {
        next.opp_b = rotate_back(next.opp_b);
      } else {
        next.opp_a = rotate_back(next.opp_a);
      }
    }
    state_ = next;
    set_index_ = set;
    prev_ = key;
    return state_;
  }

  const RotationState& state() const { return state_; }
  std::size_t set_index() const { return set_index_; }
  const std::optional<RoundKey>& previous() const { return prev_; }

 private:
  std::vector<RotationState> initial_;
  RotationState state_{};
  std::size_t set_index_ = 0;
  std::optional<RoundKey> prev_;
};

/// Batch form over one set: per-round back-row flags for both opposites.
inline BackRowFlags rotation_check(int pos_a, int pos_b, std::span<const RoundKey> rounds) {
  RotationTracker tracker({RotationState{pos_a, pos_b}});
  BackRowFlags flags;
  flags.back_row_a.reserve(rounds.size());
  flags.back_row_b.reserve(rounds.size());
  for (const auto& key : rounds) {
    const RotationState s = tracker.advance(key);
    flags.back_row_a.push_back(is_back_row(s.opp_a));
    flags.back_row_b.push_back(is_back_row(s.opp_b));
  }
  return flags;
}

inline BackRowFlags rotation_check(int pos_a, int pos_b, std::span<const std::string> files) {
  std::vector<RoundKey> keys;
  keys.reserve(files.size());
  for (const auto& f : files) keys.push_back(parse_round_key(f));
  return rotation_check(pos_a, pos_b, std::span<const RoundKey>(keys));
}

/// Team in possession during a round: rounds alternate sides within a rally,
/// starting with the serve receiver.
inline Team possession_team(const RoundKey& key) {
  return key.round % 2 == 1 ? key.team : other(key.team);
}

}  // namespace setscope
