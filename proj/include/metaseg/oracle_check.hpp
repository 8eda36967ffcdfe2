#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "metaseg/grammar.hpp"

namespace metaseg {

struct OracleCheckOptions {
  std::size_t max_exhaustive_len = 7;  // every string of length 1..max
  std::size_t random_cases = 0;
  std::size_t random_min_len = 8;
  std::size_t random_max_len = 20;
  std::uint64_t seed = 0;
};

struct OracleCheckReport {
  std::size_t exhaustive_strings = 0;
  std::size_t random_strings = 0;
  std::size_t table_mismatches = 0;
  std::size_t count_mismatches = 0;
  std::size_t segmentation_mismatches = 0;
  std::size_t expand_failures = 0;
  std::optional<std::string> first_failure;

  bool ok() const {
    return table_mismatches == 0 && count_mismatches == 0 && segmentation_mismatches == 0 &&
           expand_failures == 0;
  }
};

/// Compares build_table with build_table_bruteforce and segment with
/// segment_bruteforce on every string up to `max_exhaustive_len` and on
/// `random_cases` random strings, and checks expand() losslessness.
OracleCheckReport run_oracle_check(const MetaActionGrammar& g, const OracleCheckOptions& opts);

}  // namespace metaseg
