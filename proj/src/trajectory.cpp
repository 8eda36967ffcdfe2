#include "metaseg/trajectory.hpp"

#include <algorithm>

namespace metaseg {

namespace {

constexpr std::array<std::string_view, kNumLowLevelActions> kActionNames = {
    "MoveAhead",    "RotateRight", "RotateLeft",     "LookUp",
    "LookDown",     "PickupObject", "PutObject",     "ToggleObjectOn",
    "ToggleObjectOff", "CloseObject", "OpenObject",  "SliceObject",
};

std::string describe_letter(char c) {
  if (c >= 0x20 && c < 0x7f) return std::string("'") + c + "'";
  return "byte " + std::to_string(static_cast<unsigned char>(c));
}

}  // namespace

UnknownLetter::UnknownLetter(char letter)
    : Error("unknown action letter " + describe_letter(letter)), letter_(letter) {}

bool is_interaction(LowLevelAction action) noexcept {
  return static_cast<int>(action) >= static_cast<int>(LowLevelAction::PickupObject);
}

char to_letter(LowLevelAction action) noexcept {
  switch (action) {
    case LowLevelAction::MoveAhead: return 'm';
    case LowLevelAction::RotateRight: return 'r';
    case LowLevelAction::RotateLeft: return 'l';
    case LowLevelAction::LookUp: return 'u';
    case LowLevelAction::LookDown: return 'd';
    default: return 'i';
  }
}

std::string_view action_name(LowLevelAction action) noexcept {
  return kActionNames[static_cast<std::size_t>(action)];
}

std::optional<LowLevelAction> parse_action_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == name) return kAllLowLevelActions[i];
  }
  return std::nullopt;
}

bool is_action_letter(char c) noexcept { return kAlphabet.find(c) != std::string_view::npos; }

std::size_t letter_index(char c) {
  auto pos = kAlphabet.find(c);
  if (pos == std::string_view::npos) throw UnknownLetter(c);
  return pos;
}

std::vector<LowLevelAction> decode_letter(char letter) {
  if (!is_action_letter(letter)) throw UnknownLetter(letter);
  std::vector<LowLevelAction> out;
  for (auto a : kAllLowLevelActions) {
    if (to_letter(a) == letter) out.push_back(a);
  }
  return out;
}

ActionString::ActionString(std::string letters) : letters_(std::move(letters)) {
  for (char c : letters_) {
    if (!is_action_letter(c)) throw UnknownLetter(c);
  }
}

std::optional<std::string> check_invariants(const ActionTrajectory& traj) {
  const auto t = traj.actions.size();
  const auto n = static_cast<long long>(traj.sub_goals.size());
  if (traj.subgoal_index.size() != t) {
    return "subgoal_index has length " + std::to_string(traj.subgoal_index.size()) +
           ", expected " + std::to_string(t);
  }
  for (std::size_t i = 0; i < t; ++i) {
    const int v = traj.subgoal_index[i];
    if (v < 0 || v >= n) {
      return "subgoal_index[" + std::to_string(i) + "] = " + std::to_string(v) +
             " is outside [0, " + std::to_string(n) + ")";
    }
    if (i > 0 && v < traj.subgoal_index[i - 1]) {
      return "subgoal_index decreases at step " + std::to_string(i);
    }
  }
  if (traj.poses && traj.poses->size() != t + 1) {
    return "poses has length " + std::to_string(traj.poses->size()) + ", expected " +
           std::to_string(t + 1);
  }
  return std::nullopt;
}

ActionString encode_actions(const std::vector<LowLevelAction>& actions) {
  std::string letters;
  letters.reserve(actions.size());
  std::transform(actions.begin(), actions.end(), std::back_inserter(letters), to_letter);
  return ActionString(std::move(letters));
}

ActionString encode_actions(const ActionTrajectory& traj) { return encode_actions(traj.actions); }

}  // namespace metaseg
