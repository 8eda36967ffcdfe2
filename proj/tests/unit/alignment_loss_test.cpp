#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "metaseg/alignment_loss.hpp"
#include "metaseg/gradcheck.hpp"

namespace metaseg {
namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.flat()) v = nd(rng);
  return m;
}

EmbeddingBatch random_batch(std::mt19937_64& rng, std::size_t t, std::size_t n, std::size_t d,
                            double tau) {
  EmbeddingBatch b;
  b.states = random_matrix(rng, t, d);
  b.instructions = random_matrix(rng, n, d);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
  for (std::size_t i = 0; i < t; ++i) b.pos.push_back(pick(rng));
  b.temperature = tau;
  return b;
}

// Direct evaluation without max subtraction; fine for the small inputs used here.
double naive_loss(const EmbeddingBatch& b) {
  double total = 0.0;
  for (std::size_t t = 0; t < b.states.rows(); ++t) {
    std::vector<int> cand;
    if (b.candidates.empty()) {
      for (std::size_t n = 0; n < b.instructions.rows(); ++n) cand.push_back(static_cast<int>(n));
    } else {
      cand = b.candidates[t];
    }
    double denom = 0.0;
    for (int n : cand) {
      double s = 0.0;
      for (std::size_t k = 0; k < b.states.cols(); ++k) s += b.states(t, k) * b.instructions(n, k);
      denom += std::exp(s / b.temperature);
    }
    double pos = 0.0;
    for (std::size_t k = 0; k < b.states.cols(); ++k) pos += b.states(t, k) * b.instructions(b.pos[t], k);
    total -= std::log(std::exp(pos / b.temperature) / denom);
  }
  return total;
}

// Central differences written out here so the check does not depend on the
// library's own gradcheck helpers.
double fd_max_rel_error(Matrix& x, const Matrix& analytic, const std::function<double()>& f) {
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.flat().size(); ++i) {
    const double keep = x.flat()[i];
    x.flat()[i] = keep + h;
    const double up = f();
    x.flat()[i] = keep - h;
    const double down = f();
    x.flat()[i] = keep;
    const double num = (up - down) / (2 * h);
    const double a = analytic.flat()[i];
    const double denom = std::max({std::abs(a), std::abs(num), 1e-4});
    worst = std::max(worst, std::abs(a - num) / denom);
  }
  return worst;
}

TEST(ContrastiveLoss, SingleCandidateIsZero) {
  std::mt19937_64 rng(1);
  auto b = random_batch(rng, 5, 1, 7, 0.3);
  const auto r = contrastive_loss(b);
  EXPECT_EQ(r.value, 0.0);
  for (double g : r.grad_states.flat()) EXPECT_EQ(g, 0.0);
  for (double g : r.grad_instructions.flat()) EXPECT_EQ(g, 0.0);
}

TEST(ContrastiveLoss, ClosedFormTwoCandidates) {
  EmbeddingBatch b;
  b.states = Matrix(1, 2);
  b.states(0, 0) = 1.0;
  b.instructions = Matrix(2, 2);
  b.instructions(0, 0) = 1.0;
  b.instructions(1, 1) = 1.0;
  b.pos = {0};
  b.temperature = 1.0;
  const auto r = contrastive_loss(b);
  EXPECT_NEAR(r.value, std::log1p(std::exp(-1.0)), 1e-9);
  EXPECT_NEAR(r.value, 0.31326168751822286, 1e-9);
  // d/dz_v = (p0 - 1) w0 + p1 w1, p1 = 1 / (1 + e)
  const double p1 = 1.0 / (1.0 + std::exp(1.0));
  EXPECT_NEAR(r.grad_states(0, 0), -p1, 1e-12);
  EXPECT_NEAR(r.grad_states(0, 1), p1, 1e-12);
}

TEST(ContrastiveLoss, MatchesNaiveEvaluation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto b = random_batch(rng, 1 + trial % 8, 1 + trial % 6, 1 + trial % 16, 0.5 + 0.1 * (trial % 5));
    EXPECT_NEAR(contrastive_loss(b).value, naive_loss(b), 1e-9 * std::max(1.0, naive_loss(b)));
  }
}

TEST(ContrastiveLoss, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> tn(1, 8), nn(1, 6), dn(1, 16);
    std::uniform_real_distribution<double> taud(0.25, 2.0);
    auto b = random_batch(rng, tn(rng), nn(rng), dn(rng), taud(rng));
    for (double& v : b.states.flat()) v /= std::sqrt(static_cast<double>(b.states.cols()));
    const auto r = contrastive_loss(b);
    auto value = [&] { return contrastive_loss(b).value; };
    EXPECT_LT(fd_max_rel_error(b.states, r.grad_states, value), 1e-5);
    EXPECT_LT(fd_max_rel_error(b.instructions, r.grad_instructions, value), 1e-5);
  }
}

TEST(ContrastiveLoss, GradientsWithCandidateSubsets) {
  std::mt19937_64 rng(4);
  auto b = random_batch(rng, 3, 5, 4, 0.7);
  b.pos = {0, 2, 4};
  b.candidates = {{0, 1}, {2, 3, 0}, {4}};
  const auto r = contrastive_loss(b);
  EXPECT_NEAR(r.value, naive_loss(b), 1e-9);
  auto value = [&] { return contrastive_loss(b).value; };
  EXPECT_LT(fd_max_rel_error(b.states, r.grad_states, value), 1e-5);
  EXPECT_LT(fd_max_rel_error(b.instructions, r.grad_instructions, value), 1e-5);
  // State 2 has a single candidate and contributes nothing.
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(r.grad_states(2, k), 0.0);
}

TEST(ContrastiveLoss, ShiftInvariance) {
  // Adding the same vector c to every candidate shifts each inner product
  // of a state by <z, c>, a per-row constant.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = random_batch(rng, 1, 4, 3, 1.0);
    const double before = contrastive_loss(b).value;
    auto shifted = b;
    const double c = 3.0 + trial;
    // Pick c along a direction whose inner product with the state is exactly c.
    const double zz = dot(b.states.row(0), b.states.row(0));
    for (std::size_t n = 0; n < 4; ++n) {
      for (std::size_t k = 0; k < 3; ++k) shifted.instructions(n, k) += c * b.states(0, k) / zz;
    }
    EXPECT_NEAR(contrastive_loss(shifted).value, before, 1e-12 * std::max(1.0, c));
  }
}

TEST(ContrastiveLoss, LargeLogitsStayFinite) {
  EmbeddingBatch b;
  b.states = Matrix(1, 1, 100.0);
  b.instructions = Matrix(2, 1);
  b.instructions(0, 0) = 10.0;
  b.instructions(1, 0) = 9.0;
  b.pos = {1};
  b.temperature = 0.07;
  const auto r = contrastive_loss(b);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.value, 100.0 / 0.07, 1e-6);
}

TEST(ContrastiveLoss, PermutingNegativesKeepsValue) {
  std::mt19937_64 rng(6);
  auto b = random_batch(rng, 4, 6, 5, 0.5);
  const double before = contrastive_loss(b).value;
  // Permute instruction rows and remap positives.
  std::vector<int> perm = {3, 5, 0, 1, 4, 2};
  auto p = b;
  for (std::size_t n = 0; n < 6; ++n) {
    for (std::size_t k = 0; k < 5; ++k) p.instructions(static_cast<std::size_t>(perm[n]), k) = b.instructions(n, k);
  }
  for (auto& pos : p.pos) pos = perm[static_cast<std::size_t>(pos)];
  EXPECT_NEAR(contrastive_loss(p).value, before, 1e-12);
  auto c = b;
  c.candidates = {{5, 4, 3, 2, 1, 0}, {0, 1, 2, 3, 4, 5}, {2, 0, 4, 1, 5, 3}, {3, 1, 5, 0, 2, 4}};
  EXPECT_NEAR(contrastive_loss(c).value, before, 1e-12);
}

TEST(ContrastiveLoss, NonNegative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    EXPECT_GE(contrastive_loss(random_batch(rng, 3, 4, 5, 0.1)).value, 0.0);
  }
}

TEST(ContrastiveLoss, RejectsBadBatches) {
  std::mt19937_64 rng(8);
  auto b = random_batch(rng, 2, 3, 4, 1.0);
  auto bad = b;
  bad.instructions = Matrix(3, 5);
  EXPECT_THROW(contrastive_loss(bad), DimensionMismatch);
  bad = b;
  bad.temperature = 0.0;
  EXPECT_THROW(contrastive_loss(bad), NonPositiveTemperature);
  bad = b;
  bad.pos = {0, 3};
  EXPECT_THROW(contrastive_loss(bad), InvalidBatch);
  bad = b;
  bad.pos = {0};
  EXPECT_THROW(contrastive_loss(bad), InvalidBatch);
  bad = b;
  bad.candidates = {{1, 2}, {0, 1, 2}};
  bad.pos = {0, 0};
  EXPECT_THROW(contrastive_loss(bad), MissingPositive);
  bad = b;
  bad.instructions = Matrix(0, 4);
  bad.pos = {};
  bad.states = Matrix(0, 4);
  EXPECT_THROW(contrastive_loss(bad), InvalidBatch);
}

TEST(NegativeSets, IntraTaskOnly) {
  const auto layout = build_negative_sets({{0, 1}}, {{0, {10, 11, 12}}});
  ASSERT_EQ(layout.per_state.size(), 1u);
  const auto& c = layout.per_state[0];
  EXPECT_EQ(c.positive(), 11);
  EXPECT_EQ(c.n_intra, 2u);
  EXPECT_EQ(c.n_inter, 0u);
  EXPECT_EQ(c.rows.size(), 3u);
  EXPECT_TRUE(c.is_intra(1));
  EXPECT_TRUE(c.is_intra(2));
  std::vector<int> intra(c.rows.begin() + 1, c.rows.end());
  std::sort(intra.begin(), intra.end());
  EXPECT_EQ(intra, (std::vector<int>{10, 12}));
}

TEST(NegativeSets, InterTaskSampling) {
  const std::map<int, std::vector<int>> rows = {{0, {0, 1, 2}}, {1, {3, 4, 5, 6, 7}}};
  const auto layout = build_negative_sets({{0, 0}, {0, 2}, {1, 4}}, rows, {4, 99});
  const auto& c = layout.per_state[0];
  EXPECT_EQ(c.rows.size(), 7u);
  EXPECT_EQ(c.n_intra, 2u);
  EXPECT_EQ(c.n_inter, 4u);
  for (std::size_t slot = 3; slot < 7; ++slot) {
    EXPECT_TRUE(c.is_inter(slot));
    EXPECT_GE(c.rows[slot], 3);
  }
  // Task 1 only has three foreign rows, so it gets three inter negatives.
  EXPECT_EQ(layout.per_state[2].n_inter, 3u);
  EXPECT_EQ(layout.positives(), (std::vector<int>{0, 2, 7}));
  for (const auto& cs : layout.per_state) {
    std::vector<int> sorted = cs.rows;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
  const auto again = build_negative_sets({{0, 0}, {0, 2}, {1, 4}}, rows, {4, 99});
  EXPECT_EQ(again.candidates(), layout.candidates());
}

TEST(NegativeSets, SingleSubgoalGivesZeroLoss) {
  const auto layout = build_negative_sets({{0, 0}, {0, 0}}, {{0, {0}}});
  EXPECT_EQ(layout.per_state[0].rows.size(), 1u);
  std::mt19937_64 rng(9);
  EmbeddingBatch b = random_batch(rng, 2, 1, 4, 0.07);
  b.pos = layout.positives();
  b.candidates = layout.candidates();
  EXPECT_EQ(contrastive_loss(b).value, 0.0);
}

TEST(NegativeSets, MissingPositive) {
  EXPECT_THROW(build_negative_sets({{0, 3}}, {{0, {0, 1}}}), MissingPositive);
  EXPECT_THROW(build_negative_sets({{2, 0}}, {{0, {0, 1}}}), MissingPositive);
}

TEST(CrossEntropy, UniformLogits) {
  const auto r = sequence_cross_entropy(Matrix(3, 10), {0, 4, 9});
  EXPECT_NEAR(r.value, 2.302585092994046, 1e-12);
}

TEST(CrossEntropy, Saturated) {
  Matrix logits(2, 5);
  logits(0, 1) = 20.0;
  logits(1, 3) = 20.0;
  const auto r = sequence_cross_entropy(logits, {1, 3});
  EXPECT_NEAR(r.value, 0.0, 1e-7);
  EXPECT_GE(r.value, 0.0);
}

TEST(CrossEntropy, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> sn(1, 8), kn(1, 12);
    const std::size_t s = sn(rng), k = kn(rng);
    Matrix logits = random_matrix(rng, s, k, 2.0);
    std::uniform_int_distribution<int> tgt(0, static_cast<int>(k) - 1);
    std::vector<int> targets;
    for (std::size_t i = 0; i < s; ++i) targets.push_back(tgt(rng));
    const auto r = sequence_cross_entropy(logits, targets);
    auto value = [&] { return sequence_cross_entropy(logits, targets).value; };
    EXPECT_LT(fd_max_rel_error(logits, r.grad_logits, value), 1e-5);
  }
}

TEST(CrossEntropy, Errors) {
  EXPECT_THROW(sequence_cross_entropy(Matrix(2, 3), {0, 3}), TargetOutOfRange);
  EXPECT_THROW(sequence_cross_entropy(Matrix(2, 3), {0, -1}), TargetOutOfRange);
  EXPECT_THROW(sequence_cross_entropy(Matrix(2, 3), {0}), DimensionMismatch);
}

TEST(ComposedLoss, UnweightedSums) {
  EXPECT_DOUBLE_EQ(composed_loss(TrainingStage::Pretrain, 0.5, 1.5), 2.0);
  EXPECT_DOUBLE_EQ(composed_loss(TrainingStage::Finetune, 0.0, 0.75), 0.75);
  const auto ce = sequence_cross_entropy(Matrix(1, 10), {3});
  LossWithGrad cl;
  EXPECT_NEAR(composed_loss(TrainingStage::Pretrain, cl, ce), 2.302585, 1e-6);
}

TEST(GradCheck, SuitesPass) {
  const auto cl = gradcheck_contrastive(100, 1);
  const auto ce = gradcheck_cross_entropy(100, 2);
  EXPECT_EQ(cl.cases, 100u);
  EXPECT_TRUE(cl.passed()) << cl.max_rel_error;
  EXPECT_TRUE(ce.passed()) << ce.max_rel_error;
}

TEST(GradCheck, DetectsAWrongGradient) {
  const std::vector<double> x = {0.3, -1.2};
  const std::vector<double> wrong = {2 * 0.3, 2 * -1.2 + 0.01};
  const auto f = [](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; };
  EXPECT_GT(max_gradient_error(f, x, wrong), 1e-3);
  const std::vector<double> right = {0.6, -2.4};
  EXPECT_LT(max_gradient_error(f, x, right), 1e-8);
}

}  // namespace
}  // namespace metaseg
