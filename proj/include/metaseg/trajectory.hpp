#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/error.hpp"

namespace metaseg {

/// The twelve low-level agent actions. The first five are navigation, the
/// remaining seven are object interactions.
enum class LowLevelAction {
  MoveAhead,
  RotateRight,
  RotateLeft,
  LookUp,
  LookDown,
  PickupObject,
  PutObject,
  ToggleObjectOn,
  ToggleObjectOff,
  CloseObject,
  OpenObject,
  SliceObject,
};

inline constexpr std::size_t kNumLowLevelActions = 12;

inline constexpr std::array<LowLevelAction, kNumLowLevelActions> kAllLowLevelActions = {
    LowLevelAction::MoveAhead,      LowLevelAction::RotateRight,    LowLevelAction::RotateLeft,
    LowLevelAction::LookUp,         LowLevelAction::LookDown,       LowLevelAction::PickupObject,
    LowLevelAction::PutObject,      LowLevelAction::ToggleObjectOn, LowLevelAction::ToggleObjectOff,
    LowLevelAction::CloseObject,    LowLevelAction::OpenObject,     LowLevelAction::SliceObject,
};

/// Letter alphabet of encoded trajectories, in canonical order.
inline constexpr std::string_view kAlphabet = "mrludi";

class UnknownLetter : public Error {
 public:
  explicit UnknownLetter(char letter);
  char letter() const noexcept { return letter_; }

 private:
  char letter_;
};

class UnknownActionName : public Error {
 public:
  explicit UnknownActionName(std::string name)
      : Error("unknown low-level action name '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

bool is_interaction(LowLevelAction action) noexcept;
char to_letter(LowLevelAction action) noexcept;
std::string_view action_name(LowLevelAction action) noexcept;

/// Case-sensitive lookup by canonical name (e.g. "RotateLeft").
std::optional<LowLevelAction> parse_action_name(std::string_view name) noexcept;

bool is_action_letter(char c) noexcept;

/// Index of a letter inside kAlphabet. Throws UnknownLetter.
std::size_t letter_index(char c);

/// All actions that encode to `letter`. Singleton for navigation letters,
/// the seven interactions for 'i'.
std::vector<LowLevelAction> decode_letter(char letter);

/// A string over the six-letter action alphabet. Validated on construction.
class ActionString {
 public:
  ActionString() = default;
  explicit ActionString(std::string letters);

  const std::string& str() const noexcept { return letters_; }
  std::string_view view() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  char operator[](std::size_t i) const noexcept { return letters_[i]; }

  friend bool operator==(const ActionString&, const ActionString&) = default;

 private:
  std::string letters_;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// One episode: goal text, sub-goal instructions, and the per-step action
/// record with the sub-goal each step belongs to.
struct ActionTrajectory {
  std::string goal_text;
  std::vector<std::string> sub_goals;
  std::vector<LowLevelAction> actions;
  std::vector<int> subgoal_index;
  std::optional<std::vector<Pose>> poses;
  std::optional<std::vector<bool>> goal_conditions;

  friend bool operator==(const ActionTrajectory&, const ActionTrajectory&) = default;
};

/// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> check_invariants(const ActionTrajectory& traj);

ActionString encode_actions(const ActionTrajectory& traj);
ActionString encode_actions(const std::vector<LowLevelAction>& actions);

}  // namespace metaseg
