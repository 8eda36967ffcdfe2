#include "metaseg/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace metaseg {

SegmentationIncomplete::SegmentationIncomplete(std::size_t prefix_length,
                                               std::optional<std::size_t> trajectory)
    : Error((trajectory ? "trajectory " + std::to_string(*trajectory) + ": " : std::string()) +
            "no segmentation covers prefix [0, " + std::to_string(prefix_length) + ")"),
      prefix_length_(prefix_length),
      trajectory_(trajectory) {}

Segmentation segment(const MatchIntervalTable& table) {
  const std::size_t n = table.length();
  Segmentation result;
  result.source_length = n;
  if (n == 0) return result;

  // Candidates grouped by end, each group ordered by (start, meta_id).
  std::vector<Interval> by_end = table.entries();
  std::sort(by_end.begin(), by_end.end(), [](const Interval& a, const Interval& b) {
    return std::tie(a.end, a.start, a.meta_id) < std::tie(b.end, b.start, b.meta_id);
  });

  constexpr int kUnreachable = std::numeric_limits<int>::max();
  std::vector<int> cost(n + 1, kUnreachable);
  std::vector<const Interval*> back(n + 1, nullptr);
  cost[0] = 0;
  for (const Interval& iv : by_end) {
    const int prev = cost[static_cast<std::size_t>(iv.start)];
    if (prev == kUnreachable) continue;
    auto& here = cost[static_cast<std::size_t>(iv.end)];
    if (prev + 1 < here) {
      here = prev + 1;
      back[static_cast<std::size_t>(iv.end)] = &iv;
    }
  }

  if (cost[n] == kUnreachable) {
    std::size_t e = 1;
    while (cost[e] != kUnreachable) ++e;
    throw SegmentationIncomplete(e);
  }

  for (std::size_t pos = n; pos > 0;) {
    const Interval* iv = back[pos];
    result.segments.push_back(*iv);
    pos = static_cast<std::size_t>(iv->start);
  }
  std::reverse(result.segments.begin(), result.segments.end());
  return result;
}

Segmentation segment(const MetaActionGrammar& g, const ActionString& a) {
  return segment(build_table(g, a));
}

namespace {

class TilingSearch {
 public:
  TilingSearch(const MetaActionGrammar& g, std::string_view s) : n_(s.size()) {
    // matches_[start][len - 1] = meta ids whose pattern matches s[start, start+len)
    matches_.resize(n_);
    for (std::size_t start = 0; start < n_; ++start) {
      matches_[start].resize(n_ - start);
      for (std::size_t len = 1; start + len <= n_; ++len) {
        for (const auto& m : g.metas()) {
          if (full_match(m.pattern, s.substr(start, len))) matches_[start][len - 1].push_back(m.id);
        }
      }
    }
  }

  bool run() {
    walk(0);
    return found_;
  }

  std::vector<Segment> best() const { return best_; }

  // Smallest prefix length that no tiling reaches.
  std::size_t first_unreachable() const {
    std::vector<bool> reach(n_ + 1, false);
    reach[0] = true;
    for (std::size_t s = 0; s < n_; ++s) {
      if (!reach[s]) continue;
      for (std::size_t len = 1; s + len <= n_; ++len) {
        if (!matches_[s][len - 1].empty()) reach[s + len] = true;
      }
    }
    std::size_t e = 1;
    while (reach[e]) ++e;
    return e;
  }

 private:
  // True when `cand` beats `best_`: fewer segments, or equal count and the
  // reversed (start, meta) sequence compares lexicographically smaller.
  bool better(const std::vector<Segment>& cand) const {
    if (!found_) return true;
    if (cand.size() != best_.size()) return cand.size() < best_.size();
    for (std::size_t k = cand.size(); k-- > 0;) {
      const auto& a = cand[k];
      const auto& b = best_[k];
      if (std::tie(a.start, a.meta_id) != std::tie(b.start, b.meta_id)) {
        return std::tie(a.start, a.meta_id) < std::tie(b.start, b.meta_id);
      }
    }
    return false;
  }

  void walk(std::size_t pos) {
    if (pos == n_) {
      if (better(path_)) {
        best_ = path_;
        found_ = true;
      }
      return;
    }
    // Any completion would need more segments than the best tiling so far.
    if (found_ && path_.size() >= best_.size()) return;
    for (std::size_t len = 1; pos + len <= n_; ++len) {
      for (int id : matches_[pos][len - 1]) {
        path_.push_back({id, static_cast<int>(pos), static_cast<int>(pos + len)});
        walk(pos + len);
        path_.pop_back();
      }
    }
  }

  std::size_t n_;
  std::vector<std::vector<std::vector<int>>> matches_;
  std::vector<Segment> path_;
  std::vector<Segment> best_;
  bool found_ = false;
};

}  // namespace

Segmentation segment_bruteforce(const MetaActionGrammar& g, const ActionString& a) {
  Segmentation result;
  result.source_length = a.size();
  if (a.empty()) return result;
  TilingSearch search(g, a.view());
  if (!search.run()) throw SegmentationIncomplete(search.first_unreachable());
  result.segments = search.best();
  return result;
}

ActionString expand(const Segmentation& seg, const ActionString& a) {
  if (seg.source_length != a.size()) {
    throw CoverageMismatch("segmentation covers " + std::to_string(seg.source_length) +
                           " letters, string has " + std::to_string(a.size()));
  }
  std::string out;
  out.reserve(a.size());
  int pos = 0;
  for (const auto& s : seg.segments) {
    if (s.start != pos || s.end <= s.start || s.end > static_cast<int>(a.size())) {
      throw CoverageMismatch("segment [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                             ") does not continue at " + std::to_string(pos));
    }
    out.append(a.view().substr(static_cast<std::size_t>(s.start),
                               static_cast<std::size_t>(s.end - s.start)));
    pos = s.end;
  }
  if (pos != static_cast<int>(a.size())) {
    throw CoverageMismatch("segments stop at " + std::to_string(pos) + " of " +
                           std::to_string(a.size()));
  }
  return ActionString(std::move(out));
}

std::string format_segmentation(const MetaActionGrammar& g, const Segmentation& seg) {
  std::string out;
  for (std::size_t i = 0; i < seg.segments.size(); ++i) {
    const auto& s = seg.segments[i];
    if (i) out += ' ';
    out += g[static_cast<std::size_t>(s.meta_id)].name;
    out += '[' + std::to_string(s.start) + ',' + std::to_string(s.end) + ')';
  }
  return out;
}

SegmentationStats summarize(const MetaActionGrammar& g, const std::vector<Segmentation>& segs) {
  SegmentationStats st;
  st.n_trajectories = segs.size();
  if (segs.empty()) return st;
  std::size_t la_total = 0;
  std::size_t ma_total = 0;
  for (const auto& s : segs) {
    la_total += s.source_length;
    ma_total += s.count();
    for (const auto& seg : s.segments) ++st.meta_histogram[seg.meta_id];
  }
  const double n = static_cast<double>(segs.size());
  st.mean_la_length = static_cast<double>(la_total) / n;
  st.mean_ma_length = static_cast<double>(ma_total) / n;
  st.compression_ratio = ma_total == 0 ? 0.0 : st.mean_la_length / st.mean_ma_length;
  st.la_log10_branching = st.mean_la_length * std::log10(static_cast<double>(kNumLowLevelActions));
  st.ma_log10_branching = st.mean_ma_length * std::log10(static_cast<double>(g.size()));
  return st;
}

SegmentationStats corpus_stats(const MetaActionGrammar& g,
                               const std::vector<ActionTrajectory>& corpus) {
  std::vector<Segmentation> segs;
  segs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      segs.push_back(segment(g, encode_actions(corpus[i])));
    } catch (const SegmentationIncomplete& e) {
      throw SegmentationIncomplete(e.prefix_length(), i);
    }
  }
  return summarize(g, segs);
}

}  // namespace metaseg
