#include "metaseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace metaseg {

EmptyConditions::EmptyConditions(std::size_t episode)
    : MetricError("episode " + std::to_string(episode) + " has no goal conditions") {}

NonPositiveThreshold::NonPositiveThreshold(double d)
    : MetricError("distance threshold must be positive, got " + std::to_string(d)) {}

GoldOutOfRange::GoldOutOfRange(std::size_t state, int gold, std::size_t instructions)
    : MetricError("gold index " + std::to_string(gold) + " of state " + std::to_string(state) +
                  " is outside [0, " + std::to_string(instructions) + ")") {}

EpisodeResult EpisodeResult::from_paths(std::vector<bool> goal_conditions, Path pred, Path ref) {
  EpisodeResult e;
  e.goal_conditions = std::move(goal_conditions);
  e.pred_length = path_length(pred);
  e.ref_length = path_length(ref);
  e.pred_path = std::move(pred);
  e.ref_path = std::move(ref);
  return e;
}

double path_length(std::span<const Pose> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  }
  return total;
}

bool episode_success(const EpisodeResult& e) {
  return std::all_of(e.goal_conditions.begin(), e.goal_conditions.end(), [](bool b) { return b; });
}

double episode_goal_condition(const EpisodeResult& e) {
  if (e.goal_conditions.empty()) throw EmptyConditions(0);
  const auto met = std::count(e.goal_conditions.begin(), e.goal_conditions.end(), true);
  return static_cast<double>(met) / static_cast<double>(e.goal_conditions.size());
}

double success_rate(std::span<const EpisodeResult> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  const auto wins = std::count_if(corpus.begin(), corpus.end(), episode_success);
  return static_cast<double>(wins) / static_cast<double>(corpus.size());
}

double goal_condition_rate(std::span<const EpisodeResult> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  std::size_t met = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& gc = corpus[i].goal_conditions;
    if (gc.empty()) throw EmptyConditions(i);
    met += static_cast<std::size_t>(std::count(gc.begin(), gc.end(), true));
    total += gc.size();
  }
  return static_cast<double>(met) / static_cast<double>(total);
}

double path_length_weighted(double score, double ref_length, double pred_length) {
  const double denom = std::max(ref_length, pred_length);
  if (!(denom > 0.0)) throw DegenerateLengths();
  // Multiplying by a ratio <= 1 keeps the result <= score under rounding.
  if (pred_length <= ref_length) return score;
  return score * (ref_length / pred_length);
}

namespace {

// Corpus aggregates treat an episode where neither path moves as unpenalized.
double weighted_or_raw(double score, const EpisodeResult& e) {
  if (std::max(e.ref_length, e.pred_length) == 0.0) return score;
  return path_length_weighted(score, e.ref_length, e.pred_length);
}

}  // namespace

double plw_success_rate(std::span<const EpisodeResult> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  double total = 0.0;
  for (const auto& e : corpus) {
    total += weighted_or_raw(episode_success(e) ? 1.0 : 0.0, e);
  }
  return total / static_cast<double>(corpus.size());
}

double plw_goal_condition_rate(std::span<const EpisodeResult> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus[i];
    if (e.goal_conditions.empty()) throw EmptyConditions(i);
    total += weighted_or_raw(episode_goal_condition(e), e);
  }
  return total / static_cast<double>(corpus.size());
}

Fidelity fidelity(std::span<const Pose> pred, std::span<const Pose> ref, double d_th) {
  if (pred.empty() || ref.empty()) throw EmptyPath();
  if (!(d_th > 0.0)) throw NonPositiveThreshold(d_th);

  double coverage = 0.0;
  for (const auto& r : ref) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& p : pred) nearest = std::min(nearest, std::hypot(r.x - p.x, r.y - p.y));
    coverage += std::exp(-nearest / d_th);
  }
  Fidelity f;
  f.pc = coverage / static_cast<double>(ref.size());

  const double expected = f.pc * path_length(ref);
  const double gap = std::abs(path_length(pred) - expected);
  f.ls = (expected + gap) > 0.0 ? expected / (expected + gap) : 1.0;
  f.cls = f.pc * f.ls;
  return f;
}

double retrieval_recall(const Matrix& states, const Matrix& instructions,
                        std::span<const int> gold, std::size_t k) {
  const auto t_count = states.rows();
  const auto q_count = instructions.rows();
  if (gold.size() != t_count) {
    throw MetricError("expected one gold index per state");
  }
  if (states.cols() != instructions.cols()) {
    throw MetricError("state and instruction dimensions differ");
  }
  if (k == 0) throw MetricError("k must be at least 1");
  if (t_count == 0) throw EmptyCorpus();

  std::size_t hits = 0;
  for (std::size_t t = 0; t < t_count; ++t) {
    const int g = gold[t];
    if (g < 0 || static_cast<std::size_t>(g) >= q_count) throw GoldOutOfRange(t, g, q_count);
    const auto z = states.row(t);
    const double gold_score = dot(z, instructions.row(static_cast<std::size_t>(g)));
    // Rank = rows that outrank the gold one under (score desc, index asc).
    std::size_t ahead = 0;
    for (std::size_t q = 0; q < q_count && ahead < k; ++q) {
      if (q == static_cast<std::size_t>(g)) continue;
      const double s = dot(z, instructions.row(q));
      if (s > gold_score || (s == gold_score && q < static_cast<std::size_t>(g))) ++ahead;
    }
    if (ahead < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(t_count);
}

}  // namespace metaseg
