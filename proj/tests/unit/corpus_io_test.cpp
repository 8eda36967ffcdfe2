#include <gtest/gtest.h>

#include <cstdio>

#include "metaseg/corpus_io.hpp"

namespace metaseg {
namespace {

constexpr const char* kMinimal = R"({
  "version": "1",
  "episodes": [
    {"id": "e0", "goal": "put a mug on the desk", "sub_goals": ["walk", "grab"],
     "actions": ["MoveAhead", "RotateLeft", "PickupObject"], "subgoal_index": [0, 0, 1]}
  ]
})";

std::string episode_json(const std::string& body) {
  return R"({"version": "1", "episodes": [{"id": "x", "goal": "g", "sub_goals": ["a", "b"], )" + body +
         "}]}";
}

TEST(ParseCorpus, MinimalFile) {
  const auto c = parse_corpus(kMinimal);
  ASSERT_EQ(c.episodes.size(), 1u);
  const auto& e = c.episodes[0];
  EXPECT_EQ(e.id, "e0");
  EXPECT_EQ(e.trajectory.goal_text, "put a mug on the desk");
  EXPECT_EQ(encode_actions(e.trajectory).str(), "mli");
  EXPECT_EQ(e.trajectory.subgoal_index, (std::vector<int>{0, 0, 1}));
  EXPECT_FALSE(e.trajectory.poses.has_value());
  EXPECT_FALSE(e.pred_path.has_value());
}

TEST(ParseCorpus, DecreasingSubgoalIndex) {
  try {
    parse_corpus(episode_json(R"("actions": ["MoveAhead", "MoveAhead"], "subgoal_index": [1, 0])"));
    FAIL() << "expected InvariantViolation";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.episode(), 0u);
  }
}

TEST(ParseCorpus, UnknownActionName) {
  try {
    parse_corpus(episode_json(R"("actions": ["MoveAhead", "Jump"], "subgoal_index": [0, 0])"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "actions[1]");
    EXPECT_EQ(e.episode(), 0u);
  }
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["moveahead"], "subgoal_index": [0])")),
               SchemaError);
}

TEST(ParseCorpus, OtherInvariants) {
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["MoveAhead"], "subgoal_index": [0, 0])")),
               InvariantViolation);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["MoveAhead"], "subgoal_index": [2])")),
               InvariantViolation);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["MoveAhead"], "subgoal_index": [0], "poses": [[0, 0]])")),
               InvariantViolation);
}

TEST(ParseCorpus, SchemaErrors) {
  EXPECT_THROW(parse_corpus("not json"), SchemaError);
  EXPECT_THROW(parse_corpus("[]"), SchemaError);
  EXPECT_THROW(parse_corpus(R"({"episodes": []})"), SchemaError);
  EXPECT_THROW(parse_corpus(R"({"version": "2", "episodes": []})"), SchemaError);
  EXPECT_THROW(parse_corpus(R"({"version": "1"})"), SchemaError);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["MoveAhead"])")), SchemaError);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": ["MoveAhead"], "subgoal_index": [0.5])")),
               SchemaError);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": [], "subgoal_index": [], "pred_path": [[1]])")),
               SchemaError);
  EXPECT_THROW(parse_corpus(episode_json(R"("actions": [], "subgoal_index": [], "ref_len": -1)")),
               SchemaError);
  try {
    parse_corpus(episode_json(R"("actions": [], "subgoal_index": [], "goal_conditions": [1])"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "goal_conditions[0]");
  }
}

TEST(ParseCorpus, UnknownKeysIgnored) {
  const auto c = parse_corpus(R"({"version": "1", "note": 5, "episodes": []})");
  EXPECT_TRUE(c.episodes.empty());
  EXPECT_EQ(parse_corpus(episode_json(R"("actions": [], "subgoal_index": [], "extra": {"a": 1})")).episodes.size(),
            1u);
}

TEST(CorpusIo, RoundTrip) {
  const auto c = generate_synthetic(3, 20, 30);
  EXPECT_EQ(parse_corpus(dump_corpus(c)), c);
  const std::string path = ::testing::TempDir() + "corpus_io_roundtrip.json";
  save_corpus(c, path);
  EXPECT_EQ(load_corpus(path), c);
  std::remove(path.c_str());
  EXPECT_THROW(load_corpus(path), IoError);
}

TEST(CorpusIo, DumpIsStable) {
  const auto c = generate_synthetic(5, 3, 10);
  const auto text = dump_corpus(c);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(dump_corpus(parse_corpus(text)), text);
}

TEST(GenerateSynthetic, DeterministicPerSeed) {
  const auto a = generate_synthetic(7, 10, 50);
  EXPECT_EQ(a.episodes.size(), 10u);
  EXPECT_EQ(a, generate_synthetic(7, 10, 50));
  EXPECT_NE(a, generate_synthetic(8, 10, 50));
  EXPECT_EQ(dump_corpus(a), dump_corpus(generate_synthetic(7, 10, 50)));
}

TEST(GenerateSynthetic, EpisodesValidate) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = generate_synthetic(seed, 25, 1 + seed * 5);
    for (const auto& e : c.episodes) {
      EXPECT_FALSE(check_invariants(e.trajectory).has_value()) << *check_invariants(e.trajectory);
      EXPECT_FALSE(e.trajectory.actions.empty());
      ASSERT_TRUE(e.trajectory.goal_conditions.has_value());
      EXPECT_GE(e.trajectory.goal_conditions->size(), 1u);
      EXPECT_LE(e.trajectory.goal_conditions->size(), 4u);
    }
    EXPECT_EQ(parse_corpus(dump_corpus(c)), c);
  }
}

TEST(GenerateSynthetic, SubgoalBoundaryAfterInteractionClusters) {
  const auto c = generate_synthetic(11, 50, 40);
  for (const auto& e : c.episodes) {
    const auto& t = e.trajectory;
    for (std::size_t i = 1; i < t.actions.size(); ++i) {
      const bool boundary = is_interaction(t.actions[i - 1]) && !is_interaction(t.actions[i]);
      EXPECT_EQ(t.subgoal_index[i] - t.subgoal_index[i - 1], boundary ? 1 : 0);
    }
  }
}

TEST(GenerateSynthetic, MeanLengthNearTarget) {
  for (std::size_t mean : {10u, 50u, 120u}) {
    const auto c = generate_synthetic(99, 1000, mean);
    double total = 0.0;
    for (const auto& e : c.episodes) total += static_cast<double>(e.trajectory.actions.size());
    const double got = total / 1000.0;
    EXPECT_NEAR(got, static_cast<double>(mean), 0.2 * static_cast<double>(mean)) << mean;
  }
}

TEST(ReplayPoses, Grid) {
  using A = LowLevelAction;
  const auto p = replay_poses({A::MoveAhead, A::RotateRight, A::MoveAhead, A::LookUp, A::RotateLeft,
                               A::RotateLeft, A::MoveAhead, A::PickupObject});
  const Path expected = {{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {0, 1}, {0, 1}};
  EXPECT_EQ(p, expected);
}

TEST(ToEpisodeResult, DefaultsLengthsFromPaths) {
  auto c = parse_corpus(episode_json(
      R"("actions": [], "subgoal_index": [], "goal_conditions": [true, false],
         "pred_path": [[0, 0], [0, 3]], "ref_path": [[0, 0], [4, 0]], "ref_len": 2.5)"));
  const auto r = to_episode_result(c.episodes[0], 0);
  EXPECT_EQ(r.goal_conditions, (std::vector<bool>{true, false}));
  EXPECT_EQ(r.pred_length, 3.0);
  EXPECT_EQ(r.ref_length, 2.5);
  c.episodes[0].trajectory.goal_conditions.reset();
  EXPECT_THROW(to_episode_result(c.episodes[0], 0), SchemaError);
}

}  // namespace
}  // namespace metaseg
