#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "metaseg/alignment_loss.hpp"
#include "metaseg/error.hpp"

namespace metaseg {

class EmptyLogits : public Error {
 public:
  EmptyLogits() : Error("logits must be non-empty") {}
};

/// Uniforms are clamped to [eps, 1 - eps] before the double log.
inline constexpr double kUniformClamp = 1e-12;

struct GumbelSample {
  std::vector<double> relaxed;
  std::size_t hard_index = 0;
  double temperature = 1.0;
};

/// Noise source: std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of (seed, stream). A uniform is the top 53 bits of one
/// output scaled by 2^-53. Each (seed, stream) pair is an independent stream.
class GumbelNoise {
 public:
  explicit GumbelNoise(std::uint64_t seed, std::uint64_t stream = 0);
  double uniform();
  /// -log(-log(u)) with u clamped.
  double gumbel();

 private:
  std::mt19937_64 engine_;
};

/// softmax((logits + g) / temperature) and its argmax, with g drawn from
/// the (seed, 0) stream. Throws EmptyLogits, NonPositiveTemperature.
GumbelSample gumbel_softmax(std::span<const double> logits, double temperature,
                            std::uint64_t rng_seed);

/// As above but drawing from an explicit noise source.
GumbelSample gumbel_softmax(std::span<const double> logits, double temperature, GumbelNoise& noise);

struct StraightThrough {
  std::vector<double> forward;    // one-hot of the hard index
  std::vector<double> surrogate;  // relaxed sample, the gradient path
};

StraightThrough straight_through(const GumbelSample& sample);

struct GumbelFrequencies {
  std::vector<double> frequencies;
  double max_sum_error = 0.0;  // max over draws of |sum(relaxed) - 1|
  double min_max_entry = 1.0;  // min over draws of max(relaxed)
};

/// `draws` independent samples; draw i uses stream i of `seed`.
GumbelFrequencies sample_frequencies(std::span<const double> logits, double temperature,
                                     std::size_t draws, std::uint64_t seed);

}  // namespace metaseg
