#pragma once

// Contrastive state/instruction alignment loss and the sequence
// classification losses it is combined with during training.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "metaseg/error.hpp"
#include "metaseg/matrix.hpp"

namespace metaseg {

inline constexpr double kDefaultTemperature = 0.07;
inline constexpr std::size_t kDefaultEmbeddingDim = 768;

class InvalidBatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidBatch {
 public:
  using InvalidBatch::InvalidBatch;
};

class NonPositiveTemperature : public Error {
 public:
  explicit NonPositiveTemperature(double tau);
};

class MissingPositive : public InvalidBatch {
 public:
  using InvalidBatch::InvalidBatch;
};

class TargetOutOfRange : public Error {
 public:
  TargetOutOfRange(std::size_t step, int target, std::size_t classes);
};

/// States z^v (T x D), instructions z^w (N x D) and, for each state, the
/// index of its positive instruction.
///
/// `candidates`, when non-empty, restricts the softmax denominator of state t
/// to the listed instruction rows (which must include pos[t]). When empty,
/// every instruction row is a candidate.
struct EmbeddingBatch {
  Matrix states;
  Matrix instructions;
  std::vector<int> pos;
  double temperature = kDefaultTemperature;
  std::vector<std::vector<int>> candidates;
};

struct LossWithGrad {
  double value = 0.0;
  Matrix grad_states;
  Matrix grad_instructions;
};

struct LogitLoss {
  double value = 0.0;
  Matrix grad_logits;
};

/// Sum over states of -log softmax(<z_t, z_n> / tau)[pos(t)], with exact
/// gradients. Throws DimensionMismatch, NonPositiveTemperature, InvalidBatch.
LossWithGrad contrastive_loss(const EmbeddingBatch& batch);

/// Mean over rows of -log softmax(logits_s)[target_s]. Gradient is w.r.t.
/// the logits. Throws TargetOutOfRange, DimensionMismatch.
LogitLoss sequence_cross_entropy(const Matrix& logits, const std::vector<int>& targets);

enum class TrainingStage { Pretrain, Finetune };

/// Pretrain: L_CL + L_M. Finetune: L_CL + L_A. Both terms unweighted.
double composed_loss(TrainingStage stage, double contrastive, double task);
double composed_loss(TrainingStage stage, const LossWithGrad& contrastive, const LogitLoss& task);

// Candidate construction -----------------------------------------------------

/// One state's alignment: which task it belongs to and which of that task's
/// sub-goal instructions is its positive.
struct StateAlignment {
  int task_id = 0;
  int pos_index = 0;
};

struct NegativeSampling {
  std::size_t inter_k = 0;  // inter-task negatives per state; 0 = intra only
  std::uint64_t seed = 0;
};

/// Candidate rows for one state, laid out as [positive, intra..., inter...].
struct CandidateSet {
  std::vector<int> rows;
  std::size_t n_intra = 0;
  std::size_t n_inter = 0;

  int positive() const { return rows.front(); }
  bool is_intra(std::size_t slot) const { return slot >= 1 && slot < 1 + n_intra; }
  bool is_inter(std::size_t slot) const { return slot >= 1 + n_intra; }
};

struct NegativeLayout {
  std::vector<CandidateSet> per_state;

  std::vector<int> positives() const;
  std::vector<std::vector<int>> candidates() const;
};

/// `instruction_rows` maps a task id to the global instruction rows of its
/// sub-goals, in sub-goal order. Inter-task negatives are sampled without
/// replacement from the rows of all other tasks, deterministically per
/// (seed, state index). Throws MissingPositive.
NegativeLayout build_negative_sets(const std::vector<StateAlignment>& states,
                                   const std::map<int, std::vector<int>>& instruction_rows,
                                   const NegativeSampling& sampling = {});

}  // namespace metaseg
