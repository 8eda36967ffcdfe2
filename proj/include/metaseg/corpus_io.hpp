#pragma once

// Corpus files: a JSON document {"version": "1", "episodes": [...]}.
//
// Each episode object:
//   id              string
//   goal            string
//   sub_goals       [string]
//   actions         [action name]          exact names, case-sensitive
//   subgoal_index   [int]                  one per action, non-decreasing
//   poses           [[x, y]]               optional, |actions| + 1 points
//   goal_conditions [bool]                 optional
//   pred_path       [[x, y]]               optional
//   ref_path        [[x, y]]               optional
//   pred_len        number                 optional, defaults to len(pred_path)
//   ref_len         number                 optional, defaults to len(ref_path)
//
// Unknown keys are ignored.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/error.hpp"
#include "metaseg/metrics.hpp"
#include "metaseg/trajectory.hpp"

namespace metaseg {

inline constexpr std::string_view kCorpusVersion = "1";

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string field, std::optional<std::size_t> episode, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  std::optional<std::size_t> episode() const noexcept { return episode_; }

 private:
  std::string field_;
  std::optional<std::size_t> episode_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::size_t episode, std::string reason);
  std::size_t episode() const noexcept { return episode_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t episode_;
  std::string reason_;
};

struct Episode {
  std::string id;
  ActionTrajectory trajectory;
  std::optional<Path> pred_path;
  std::optional<Path> ref_path;
  std::optional<double> pred_len;
  std::optional<double> ref_len;

  friend bool operator==(const Episode&, const Episode&) = default;
};

struct CorpusFile {
  std::string version{kCorpusVersion};
  std::vector<Episode> episodes;

  friend bool operator==(const CorpusFile&, const CorpusFile&) = default;
};

/// Parses and validates. Throws SchemaError / InvariantViolation.
CorpusFile parse_corpus(std::string_view json_text);

/// Reads `path` then parse_corpus. Throws IoError as well.
CorpusFile load_corpus(const std::string& path);

/// Pretty-printed JSON (2-space indent, keys sorted), newline-terminated.
std::string dump_corpus(const CorpusFile& corpus);

void save_corpus(const CorpusFile& corpus, const std::string& path);

/// Builds the metric view of an episode. Throws SchemaError when the
/// episode has no goal_conditions.
EpisodeResult to_episode_result(const Episode& e, std::size_t index);

/// Deterministic random-walk corpus. Episode lengths are uniform on
/// [ceil(mean_len/2), mean_len + mean_len/2]; a sub-goal boundary follows
/// every interaction cluster that is not at the very end.
CorpusFile generate_synthetic(std::uint64_t seed, std::size_t n, std::size_t mean_len);

/// Agent poses from replaying actions on a unit grid, starting at the
/// origin facing +y. Length is |actions| + 1.
Path replay_poses(const std::vector<LowLevelAction>& actions);

}  // namespace metaseg
