#pragma once

#include <cstddef>
#include <vector>

#include "metaseg/grammar.hpp"
#include "metaseg/trajectory.hpp"

namespace metaseg {

/// Half-open span [start, end) of the action string matched by one meta-action.
struct Interval {
  int meta_id = 0;
  int start = 0;
  int end = 0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Orders by (start, end, meta_id), the table's canonical order.
bool interval_less(const Interval& a, const Interval& b) noexcept;

/// Sparse set of (meta, start, end) triples whose substring fully matches the
/// meta-action's pattern.
class MatchIntervalTable {
 public:
  MatchIntervalTable() = default;
  /// Sorts and deduplicates `entries`.
  MatchIntervalTable(std::size_t length, std::vector<Interval> entries);

  std::size_t length() const noexcept { return length_; }
  const std::vector<Interval>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(const Interval& iv) const;

  friend bool operator==(const MatchIntervalTable&, const MatchIntervalTable&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<Interval> entries_;
};

/// Scans each pattern forward from every start position, stopping as soon
/// as the automaton dies. Cost is proportional to the reachable spans.
MatchIntervalTable build_table(const MetaActionGrammar& g, const ActionString& a);

/// Reference builder: calls full_match on every (pattern, substring) pair.
MatchIntervalTable build_table_bruteforce(const MetaActionGrammar& g, const ActionString& a);

}  // namespace metaseg
