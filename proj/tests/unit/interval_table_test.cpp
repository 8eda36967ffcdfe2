#include <gtest/gtest.h>

#include <random>

#include "language_oracle.hpp"
#include "metaseg/grammar.hpp"
#include "metaseg/interval_table.hpp"

namespace metaseg {
namespace {

constexpr int kMoveForward = 2;
constexpr int kStepLeft = 1;
constexpr int kTurnLeft = 4;
constexpr int kTurnAround = 6;

std::string random_letters(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<std::size_t> letter(0, kAlphabet.size() - 1);
  std::string s(len, 'm');
  for (char& c : s) c = kAlphabet[letter(rng)];
  return s;
}

TEST(BuildTable, MoveForwardMarksEverySubRun) {
  const auto t = build_table(default_grammar(), ActionString("mmm"));
  for (auto [s, e] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}) {
    EXPECT_TRUE(t.contains({kMoveForward, s, e})) << s << "," << e;
  }
  EXPECT_EQ(t.size(), 6u);
}

TEST(BuildTable, StepLeftWholeString) {
  EXPECT_TRUE(build_table(default_grammar(), ActionString("lmmr")).contains({kStepLeft, 0, 4}));
}

TEST(BuildTable, EmptyString) {
  const auto t = build_table(default_grammar(), ActionString(""));
  EXPECT_EQ(t.size(), 0u);
  EXPECT_EQ(t.length(), 0u);
}

TEST(BuildTable, TurnAroundAndTurns) {
  const auto t = build_table(default_grammar(), ActionString("ll"));
  EXPECT_TRUE(t.contains({kTurnAround, 0, 2}));
  EXPECT_TRUE(t.contains({kTurnLeft, 0, 1}));
  EXPECT_TRUE(t.contains({kTurnLeft, 1, 2}));
  EXPECT_EQ(t.size(), 3u);
}

TEST(BuildTable, SinglePatternGrammar) {
  const auto g = load_grammar("Interaction\ti\n");
  const auto t = build_table(g, ActionString("i"));
  EXPECT_EQ(t.entries(), (std::vector<Interval>{{0, 0, 1}}));
}

TEST(BuildTable, EntriesAreSortedAndInRange) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ActionString a(random_letters(rng, 1 + trial % 30));
    const auto t = build_table(default_grammar(), a);
    EXPECT_TRUE(std::is_sorted(t.entries().begin(), t.entries().end(), interval_less));
    for (const auto& iv : t.entries()) {
      ASSERT_LE(0, iv.start);
      ASSERT_LT(iv.start, iv.end);
      ASSERT_LE(static_cast<std::size_t>(iv.end), a.size());
      ASSERT_TRUE(full_match(default_grammar()[static_cast<std::size_t>(iv.meta_id)].pattern,
                             a.view().substr(static_cast<std::size_t>(iv.start),
                                             static_cast<std::size_t>(iv.end - iv.start))));
    }
  }
}

// Independent oracle: membership via the enumerated language of each pattern.
TEST(BuildTable, MatchesLanguageOracleExhaustively) {
  const auto& g = default_grammar();
  constexpr std::size_t kMax = 5;
  std::vector<testing::Language> langs;
  for (const auto& m : g.metas()) langs.push_back(testing::enumerate_language(m.pattern.ast(), kMax));
  for (const auto& s : testing::all_strings(kMax)) {
    std::vector<Interval> expected;
    for (std::size_t st = 0; st < s.size(); ++st) {
      for (std::size_t en = st + 1; en <= s.size(); ++en) {
        for (std::size_t m = 0; m < g.size(); ++m) {
          if (langs[m].contains(s.substr(st, en - st))) {
            expected.push_back({static_cast<int>(m), static_cast<int>(st), static_cast<int>(en)});
          }
        }
      }
    }
    ASSERT_EQ(build_table(g, ActionString(s)), MatchIntervalTable(s.size(), expected)) << s;
  }
}

TEST(BuildTable, EqualsBruteForceUpToSeven) {
  for (const auto& s : testing::all_strings(7)) {
    const ActionString a(s);
    ASSERT_EQ(build_table(default_grammar(), a), build_table_bruteforce(default_grammar(), a)) << s;
  }
}

TEST(BuildTable, EqualsBruteForceOnRandomStrings) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(0, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const ActionString a(random_letters(rng, len(rng)));
    ASSERT_EQ(build_table(default_grammar(), a), build_table_bruteforce(default_grammar(), a))
        << a.str();
  }
}

TEST(BuildTable, MonotoneUnderGrammarExtension) {
  const auto base = load_grammar("Move Forward\tm{1,}\nTurn Left\tl\n");
  const auto extended = load_grammar("Move Forward\tm{1,}\nTurn Left\tl\nStep Left\tlm{,3}r\nAny\t(m|l|r)+\n");
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const ActionString a(random_letters(rng, trial % 15));
    const auto small = build_table(base, a);
    const auto big = build_table(extended, a);
    for (const auto& iv : small.entries()) ASSERT_TRUE(big.contains(iv)) << a.str();
  }
}

TEST(MatchIntervalTable, SortsAndDeduplicates) {
  const MatchIntervalTable t(4, {{1, 2, 3}, {0, 0, 4}, {1, 2, 3}, {0, 0, 1}});
  EXPECT_EQ(t.entries(), (std::vector<Interval>{{0, 0, 1}, {0, 0, 4}, {1, 2, 3}}));
}

TEST(BuildTable, LongRunStaysFast) {
  // Quadratic entry count is expected for a long Move Forward run.
  const ActionString a(std::string(2000, 'm'));
  const auto t = build_table(default_grammar(), a);
  EXPECT_EQ(t.size(), 2000u * 2001u / 2u);
}

}  // namespace
}  // namespace metaseg
