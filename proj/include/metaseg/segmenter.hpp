#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metaseg/grammar.hpp"
#include "metaseg/interval_table.hpp"
#include "metaseg/trajectory.hpp"

namespace metaseg {

using Segment = Interval;

struct Segmentation {
  std::vector<Segment> segments;
  std::size_t source_length = 0;

  std::size_t count() const noexcept { return segments.size(); }
  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

/// No tiling exists. `prefix_length` is the smallest e such that [0, e)
/// cannot be tiled by grammar segments.
class SegmentationIncomplete : public Error {
 public:
  explicit SegmentationIncomplete(std::size_t prefix_length,
                                  std::optional<std::size_t> trajectory = std::nullopt);
  std::size_t prefix_length() const noexcept { return prefix_length_; }
  std::optional<std::size_t> trajectory() const noexcept { return trajectory_; }

 private:
  std::size_t prefix_length_;
  std::optional<std::size_t> trajectory_;
};

class CoverageMismatch : public Error {
 public:
  using Error::Error;
};

/// Minimum-count tiling by dynamic programming over the interval table.
///
/// Ties between equally short tilings are broken deterministically: scanning
/// segments from the last one backwards, the tiling whose segment has the
/// smaller start wins, then the smaller meta id.
Segmentation segment(const MetaActionGrammar& g, const ActionString& a);

/// Same as segment() but reuses a prebuilt table for `a`.
Segmentation segment(const MatchIntervalTable& table);

/// Exhaustive enumeration of every tiling; same contract and tie-break as
/// segment(). Exponential, intended for strings of at most ~12 letters.
Segmentation segment_bruteforce(const MetaActionGrammar& g, const ActionString& a);

/// Concatenates the covered substrings. Throws CoverageMismatch unless the
/// segments tile [0, |a|) exactly.
ActionString expand(const Segmentation& seg, const ActionString& a);

/// `Name[start,end) Name[start,end) ...`
std::string format_segmentation(const MetaActionGrammar& g, const Segmentation& seg);

struct SegmentationStats {
  std::size_t n_trajectories = 0;
  double mean_la_length = 0.0;
  double mean_ma_length = 0.0;
  double compression_ratio = 0.0;
  /// log10 of the mean search-space size: |actions|^mean_la and |metas|^mean_ma.
  double la_log10_branching = 0.0;
  double ma_log10_branching = 0.0;
  std::map<int, std::size_t> meta_histogram;

  friend bool operator==(const SegmentationStats&, const SegmentationStats&) = default;
};

/// Aggregates over already-computed segmentations.
SegmentationStats summarize(const MetaActionGrammar& g, const std::vector<Segmentation>& segs);

/// Segments every trajectory and aggregates. SegmentationIncomplete carries
/// the failing trajectory's index.
SegmentationStats corpus_stats(const MetaActionGrammar& g,
                               const std::vector<ActionTrajectory>& corpus);

}  // namespace metaseg
