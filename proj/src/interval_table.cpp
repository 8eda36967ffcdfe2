#include "metaseg/interval_table.hpp"

#include <algorithm>
#include <tuple>

namespace metaseg {

bool interval_less(const Interval& a, const Interval& b) noexcept {
  return std::tie(a.start, a.end, a.meta_id) < std::tie(b.start, b.end, b.meta_id);
}

MatchIntervalTable::MatchIntervalTable(std::size_t length, std::vector<Interval> entries)
    : length_(length), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), interval_less);
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

bool MatchIntervalTable::contains(const Interval& iv) const {
  return std::binary_search(entries_.begin(), entries_.end(), iv, interval_less);
}

MatchIntervalTable build_table(const MetaActionGrammar& g, const ActionString& a) {
  const std::string_view s = a.view();
  const int n = static_cast<int>(s.size());
  std::vector<Interval> out;
  for (const auto& meta : g.metas()) {
    const Nfa& nfa = meta.pattern.nfa();
    Nfa::StateSet cur;
    Nfa::StateSet next;
    for (int start = 0; start < n; ++start) {
      cur = nfa.initial();
      for (int end = start + 1; end <= n; ++end) {
        if (!nfa.step(cur, s[static_cast<std::size_t>(end - 1)], next)) break;
        cur.swap(next);
        if (nfa.accepts(cur)) out.push_back({meta.id, start, end});
      }
    }
  }
  return MatchIntervalTable(s.size(), std::move(out));
}

MatchIntervalTable build_table_bruteforce(const MetaActionGrammar& g, const ActionString& a) {
  const std::string_view s = a.view();
  const int n = static_cast<int>(s.size());
  std::vector<Interval> out;
  for (int start = 0; start < n; ++start) {
    for (int end = start + 1; end <= n; ++end) {
      const auto sub = s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(end - start));
      for (const auto& meta : g.metas()) {
        if (full_match(meta.pattern, sub)) out.push_back({meta.id, start, end});
      }
    }
  }
  return MatchIntervalTable(s.size(), std::move(out));
}

}  // namespace metaseg
