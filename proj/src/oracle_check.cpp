#include "metaseg/oracle_check.hpp"

#include <random>

#include "metaseg/interval_table.hpp"
#include "metaseg/segmenter.hpp"

namespace metaseg {

namespace {

struct Outcome {
  std::optional<Segmentation> seg;
  std::size_t incomplete_at = 0;
};

template <class F>
Outcome attempt(F&& f) {
  Outcome o;
  try {
    o.seg = f();
  } catch (const SegmentationIncomplete& e) {
    o.incomplete_at = e.prefix_length();
  }
  return o;
}

void check_one(const MetaActionGrammar& g, const std::string& letters, OracleCheckReport& rep) {
  const ActionString a(letters);
  auto note = [&](const std::string& what) {
    if (!rep.first_failure) rep.first_failure = what + " on \"" + letters + "\"";
  };

  const auto table = build_table(g, a);
  if (table != build_table_bruteforce(g, a)) {
    ++rep.table_mismatches;
    note("interval table mismatch");
  }

  const Outcome dp = attempt([&] { return segment(table); });
  const Outcome brute = attempt([&] { return segment_bruteforce(g, a); });
  if (dp.seg.has_value() != brute.seg.has_value()) {
    ++rep.count_mismatches;
    ++rep.segmentation_mismatches;
    note("feasibility mismatch");
    return;
  }
  if (!dp.seg) {
    if (dp.incomplete_at != brute.incomplete_at) {
      ++rep.segmentation_mismatches;
      note("incomplete-prefix mismatch");
    }
    return;
  }
  if (dp.seg->count() != brute.seg->count()) {
    ++rep.count_mismatches;
    note("segment count mismatch");
  }
  if (*dp.seg != *brute.seg) {
    ++rep.segmentation_mismatches;
    note("tie-break mismatch");
  }
  try {
    if (expand(*dp.seg, a) != a) {
      ++rep.expand_failures;
      note("expand mismatch");
    }
  } catch (const CoverageMismatch&) {
    ++rep.expand_failures;
    note("expand coverage failure");
  }
}

}  // namespace

OracleCheckReport run_oracle_check(const MetaActionGrammar& g, const OracleCheckOptions& opts) {
  OracleCheckReport rep;
  std::string s;
  for (std::size_t len = 1; len <= opts.max_exhaustive_len; ++len) {
    std::vector<std::size_t> digits(len, 0);
    s.assign(len, kAlphabet[0]);
    while (true) {
      check_one(g, s, rep);
      ++rep.exhaustive_strings;
      std::size_t i = 0;
      while (i < len && ++digits[i] == kAlphabet.size()) {
        digits[i] = 0;
        s[i] = kAlphabet[0];
        ++i;
      }
      if (i == len) break;
      s[i] = kAlphabet[digits[i]];
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> len_dist(opts.random_min_len, opts.random_max_len);
  std::uniform_int_distribution<std::size_t> letter(0, kAlphabet.size() - 1);
  for (std::size_t c = 0; c < opts.random_cases; ++c) {
    s.resize(len_dist(rng));
    for (char& ch : s) ch = kAlphabet[letter(rng)];
    check_one(g, s, rep);
    ++rep.random_strings;
  }
  return rep;
}

}  // namespace metaseg
