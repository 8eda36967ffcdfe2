#include "metaseg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "metaseg/alignment_loss.hpp"

namespace metaseg {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

double max_gradient_error(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x, std::span<const double> analytic,
                          double step) {
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = f(probe);
    probe[i] = orig - step;
    const double down = f(probe);
    probe[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, relative_error(analytic[i], numeric));
  }
  return worst;
}

namespace {

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void fill_normal(std::span<double> xs, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  for (double& x : xs) x = dist(rng);
}

}  // namespace

GradCheckReport gradcheck_contrastive(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradCheckReport report;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto t = uniform_size(rng, 1, 8);
    const auto n = uniform_size(rng, 1, 6);
    const auto d = uniform_size(rng, 1, 16);

    EmbeddingBatch batch;
    batch.states = Matrix(t, d);
    batch.instructions = Matrix(n, d);
    fill_normal(batch.states.flat(), rng, 1.0 / std::sqrt(static_cast<double>(d)));
    fill_normal(batch.instructions.flat(), rng, 1.0);
    batch.temperature = std::uniform_real_distribution<double>(0.25, 2.0)(rng);
    for (std::size_t i = 0; i < t; ++i) {
      batch.pos.push_back(static_cast<int>(uniform_size(rng, 0, n - 1)));
    }

    const LossWithGrad analytic = contrastive_loss(batch);

    EmbeddingBatch probe = batch;
    auto by_states = [&](std::span<const double> xs) {
      std::copy(xs.begin(), xs.end(), probe.states.flat().begin());
      return contrastive_loss(probe).value;
    };
    report.max_rel_error = std::max(
        report.max_rel_error,
        max_gradient_error(by_states, batch.states.flat(), analytic.grad_states.flat()));
    probe = batch;
    auto by_instructions = [&](std::span<const double> xs) {
      std::copy(xs.begin(), xs.end(), probe.instructions.flat().begin());
      return contrastive_loss(probe).value;
    };
    report.max_rel_error = std::max(report.max_rel_error,
                                    max_gradient_error(by_instructions, batch.instructions.flat(),
                                                       analytic.grad_instructions.flat()));
    report.coordinates += (t + n) * d;
    ++report.cases;
  }
  return report;
}

GradCheckReport gradcheck_cross_entropy(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradCheckReport report;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto s = uniform_size(rng, 1, 8);
    const auto k = uniform_size(rng, 1, 12);
    Matrix logits(s, k);
    fill_normal(logits.flat(), rng, 2.0);
    std::vector<int> targets;
    for (std::size_t i = 0; i < s; ++i) targets.push_back(static_cast<int>(uniform_size(rng, 0, k - 1)));

    const LogitLoss analytic = sequence_cross_entropy(logits, targets);
    Matrix probe = logits;
    auto f = [&](std::span<const double> xs) {
      std::copy(xs.begin(), xs.end(), probe.flat().begin());
      return sequence_cross_entropy(probe, targets).value;
    };
    report.max_rel_error = std::max(report.max_rel_error,
                                    max_gradient_error(f, logits.flat(), analytic.grad_logits.flat()));
    report.coordinates += s * k;
    ++report.cases;
  }
  return report;
}

}  // namespace metaseg
