#pragma once

// Task-level and path-level evaluation metrics.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "metaseg/error.hpp"
#include "metaseg/matrix.hpp"
#include "metaseg/trajectory.hpp"

namespace metaseg {

using Path = std::vector<Pose>;

class MetricError : public Error {
 public:
  using Error::Error;
};
class EmptyCorpus : public MetricError {
 public:
  EmptyCorpus() : MetricError("metric needs at least one episode") {}
};
class EmptyConditions : public MetricError {
 public:
  explicit EmptyConditions(std::size_t episode);
};
class DegenerateLengths : public MetricError {
 public:
  DegenerateLengths() : MetricError("reference and predicted path lengths are both zero") {}
};
class EmptyPath : public MetricError {
 public:
  EmptyPath() : MetricError("path must contain at least one point") {}
};
class NonPositiveThreshold : public MetricError {
 public:
  explicit NonPositiveThreshold(double d);
};
class GoldOutOfRange : public MetricError {
 public:
  GoldOutOfRange(std::size_t state, int gold, std::size_t instructions);
};

inline constexpr double kDefaultDistanceThreshold = 1.0;

struct EpisodeResult {
  std::vector<bool> goal_conditions;
  Path pred_path;
  Path ref_path;
  double pred_length = 0.0;
  double ref_length = 0.0;

  /// Fills both lengths from the paths.
  static EpisodeResult from_paths(std::vector<bool> goal_conditions, Path pred, Path ref);
};

/// Sum of Euclidean distances between consecutive points.
double path_length(std::span<const Pose> path);

bool episode_success(const EpisodeResult& e);
/// Fraction of this episode's goal conditions that hold. Throws EmptyConditions.
double episode_goal_condition(const EpisodeResult& e);

/// Fraction of episodes where every goal condition holds.
double success_rate(std::span<const EpisodeResult> corpus);

/// Satisfied conditions over all conditions, pooled across the corpus.
double goal_condition_rate(std::span<const EpisodeResult> corpus);

/// s * L / max(L, L_hat).
double path_length_weighted(double score, double ref_length, double pred_length);

/// Corpus means of the per-episode path-length-weighted success and
/// goal-condition ratio. Episodes whose paths both have zero length count
/// with their raw score.
double plw_success_rate(std::span<const EpisodeResult> corpus);
double plw_goal_condition_rate(std::span<const EpisodeResult> corpus);

struct Fidelity {
  double pc = 0.0;
  double ls = 0.0;
  double cls = 0.0;
};

/// Path coverage, length score and their product.
///
///   PC  = mean over reference points r of exp(-min_p |r - p| / d_th)
///   LS  = PC*len(ref) / (PC*len(ref) + |len(pred) - PC*len(ref)|)
///   CLS = PC * LS
///
/// Distances are point to point. LS is 1 when both its numerator and the
/// length difference vanish.
Fidelity fidelity(std::span<const Pose> pred, std::span<const Pose> ref,
                  double d_th = kDefaultDistanceThreshold);

/// Fraction of states whose gold instruction is among the top-k rows by
/// inner product; ties go to the lower instruction index.
double retrieval_recall(const Matrix& states, const Matrix& instructions,
                        std::span<const int> gold, std::size_t k);

}  // namespace metaseg
