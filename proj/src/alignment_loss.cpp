#include "metaseg/alignment_loss.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <set>
#include <string>

namespace metaseg {

NonPositiveTemperature::NonPositiveTemperature(double tau)
    : Error("temperature must be positive, got " + std::to_string(tau)) {}

TargetOutOfRange::TargetOutOfRange(std::size_t step, int target, std::size_t classes)
    : Error("target " + std::to_string(target) + " at row " + std::to_string(step) +
            " is outside [0, " + std::to_string(classes) + ")") {}

namespace {

void validate(const EmbeddingBatch& b) {
  if (!(b.temperature > 0.0)) throw NonPositiveTemperature(b.temperature);
  const auto t = b.states.rows();
  const auto n = b.instructions.rows();
  if (n == 0) throw DimensionMismatch("batch has no instructions");
  if (b.states.cols() != b.instructions.cols()) {
    throw DimensionMismatch("state dimension " + std::to_string(b.states.cols()) +
                            " != instruction dimension " + std::to_string(b.instructions.cols()));
  }
  if (b.pos.size() != t) {
    throw DimensionMismatch("pos has " + std::to_string(b.pos.size()) + " entries for " +
                            std::to_string(t) + " states");
  }
  for (std::size_t i = 0; i < t; ++i) {
    if (b.pos[i] < 0 || static_cast<std::size_t>(b.pos[i]) >= n) {
      throw InvalidBatch("pos[" + std::to_string(i) + "] out of range");
    }
  }
  if (b.candidates.empty()) return;
  if (b.candidates.size() != t) throw DimensionMismatch("candidates must have one list per state");
  for (std::size_t i = 0; i < t; ++i) {
    const auto& c = b.candidates[i];
    std::set<int> seen;
    for (int row : c) {
      if (row < 0 || static_cast<std::size_t>(row) >= n) {
        throw InvalidBatch("candidate row " + std::to_string(row) + " out of range");
      }
      if (!seen.insert(row).second) {
        throw InvalidBatch("duplicate candidate row " + std::to_string(row));
      }
    }
    if (!seen.contains(b.pos[i])) {
      throw MissingPositive("candidates of state " + std::to_string(i) + " omit its positive");
    }
  }
}

}  // namespace

LossWithGrad contrastive_loss(const EmbeddingBatch& batch) {
  validate(batch);
  const auto t_count = batch.states.rows();
  const auto n_count = batch.instructions.rows();
  const auto dim = batch.states.cols();
  const double inv_tau = 1.0 / batch.temperature;

  LossWithGrad out;
  out.grad_states = Matrix(t_count, dim);
  out.grad_instructions = Matrix(n_count, dim);

  std::vector<int> all_rows(n_count);
  for (std::size_t n = 0; n < n_count; ++n) all_rows[n] = static_cast<int>(n);

  std::vector<double> logits;
  for (std::size_t t = 0; t < t_count; ++t) {
    const auto& rows = batch.candidates.empty() ? all_rows : batch.candidates[t];
    const auto z = batch.states.row(t);
    const int positive = batch.pos[t];

    logits.resize(rows.size());
    double max_logit = -INFINITY;
    double pos_logit = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      logits[k] = dot(z, batch.instructions.row(static_cast<std::size_t>(rows[k]))) * inv_tau;
      max_logit = std::max(max_logit, logits[k]);
      if (rows[k] == positive) pos_logit = logits[k];
    }
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - max_logit);
    const double lse = max_logit + std::log(sum);
    out.value += lse - pos_logit;

    // d/dl_k = p_k - [k == pos]; chain through l_k = <z, w_k> / tau.
    auto gz = out.grad_states.row(t);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto row = static_cast<std::size_t>(rows[k]);
      const double coeff = (std::exp(logits[k] - lse) - (rows[k] == positive ? 1.0 : 0.0)) * inv_tau;
      const auto w = batch.instructions.row(row);
      auto gw = out.grad_instructions.row(row);
      for (std::size_t d = 0; d < dim; ++d) {
        gz[d] += coeff * w[d];
        gw[d] += coeff * z[d];
      }
    }
  }
  return out;
}

LogitLoss sequence_cross_entropy(const Matrix& logits, const std::vector<int>& targets) {
  const auto s_count = logits.rows();
  const auto k_count = logits.cols();
  if (targets.size() != s_count) {
    throw DimensionMismatch("expected " + std::to_string(s_count) + " targets, got " +
                            std::to_string(targets.size()));
  }
  for (std::size_t s = 0; s < s_count; ++s) {
    if (targets[s] < 0 || static_cast<std::size_t>(targets[s]) >= k_count) {
      throw TargetOutOfRange(s, targets[s], k_count);
    }
  }

  LogitLoss out;
  out.grad_logits = Matrix(s_count, k_count);
  if (s_count == 0) return out;
  const double inv_s = 1.0 / static_cast<double>(s_count);
  for (std::size_t s = 0; s < s_count; ++s) {
    const auto row = logits.row(s);
    const double max_logit = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double l : row) sum += std::exp(l - max_logit);
    const double lse = max_logit + std::log(sum);
    const auto target = static_cast<std::size_t>(targets[s]);
    out.value += lse - row[target];
    auto g = out.grad_logits.row(s);
    for (std::size_t k = 0; k < k_count; ++k) {
      g[k] = (std::exp(row[k] - lse) - (k == target ? 1.0 : 0.0)) * inv_s;
    }
  }
  out.value *= inv_s;
  return out;
}

double composed_loss(TrainingStage /*stage*/, double contrastive, double task) {
  // Both stages add the contrastive term to their task loss with unit weight;
  // the stage only decides which task loss the caller passes in.
  return contrastive + task;
}

double composed_loss(TrainingStage stage, const LossWithGrad& contrastive, const LogitLoss& task) {
  return composed_loss(stage, contrastive.value, task.value);
}

std::vector<int> NegativeLayout::positives() const {
  std::vector<int> out;
  out.reserve(per_state.size());
  for (const auto& c : per_state) out.push_back(c.positive());
  return out;
}

std::vector<std::vector<int>> NegativeLayout::candidates() const {
  std::vector<std::vector<int>> out;
  out.reserve(per_state.size());
  for (const auto& c : per_state) out.push_back(c.rows);
  return out;
}

NegativeLayout build_negative_sets(const std::vector<StateAlignment>& states,
                                   const std::map<int, std::vector<int>>& instruction_rows,
                                   const NegativeSampling& sampling) {
  NegativeLayout layout;
  layout.per_state.reserve(states.size());

  // Rows per task excluding that task, built lazily once per task.
  std::map<int, std::vector<int>> foreign_rows;
  auto foreign_for = [&](int task) -> const std::vector<int>& {
    auto it = foreign_rows.find(task);
    if (it != foreign_rows.end()) return it->second;
    const auto& own = instruction_rows.at(task);
    std::set<int> pool;
    for (const auto& [other, rows] : instruction_rows) {
      if (other != task) pool.insert(rows.begin(), rows.end());
    }
    for (int r : own) pool.erase(r);
    return foreign_rows.emplace(task, std::vector<int>(pool.begin(), pool.end())).first->second;
  };

  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& st = states[i];
    auto it = instruction_rows.find(st.task_id);
    if (it == instruction_rows.end()) {
      throw MissingPositive("state " + std::to_string(i) + " refers to unknown task " +
                            std::to_string(st.task_id));
    }
    const auto& own = it->second;
    if (st.pos_index < 0 || static_cast<std::size_t>(st.pos_index) >= own.size()) {
      throw MissingPositive("state " + std::to_string(i) + " has no instruction " +
                            std::to_string(st.pos_index) + " in task " +
                            std::to_string(st.task_id));
    }

    CandidateSet c;
    c.rows.push_back(own[static_cast<std::size_t>(st.pos_index)]);
    for (std::size_t k = 0; k < own.size(); ++k) {
      if (k != static_cast<std::size_t>(st.pos_index)) c.rows.push_back(own[k]);
    }
    c.n_intra = own.size() - 1;

    if (sampling.inter_k > 0) {
      const auto& pool = foreign_for(st.task_id);
      std::seed_seq seq{static_cast<std::uint32_t>(sampling.seed),
                        static_cast<std::uint32_t>(sampling.seed >> 32),
                        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
      std::mt19937_64 rng(seq);
      const auto before = c.rows.size();
      std::sample(pool.begin(), pool.end(), std::back_inserter(c.rows),
                  std::min(sampling.inter_k, pool.size()), rng);
      c.n_inter = c.rows.size() - before;
    }
    layout.per_state.push_back(std::move(c));
  }
  return layout;
}

}  // namespace metaseg
