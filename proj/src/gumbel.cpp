#include "metaseg/gumbel.hpp"

#include <algorithm>
#include <cmath>

namespace metaseg {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

GumbelNoise::GumbelNoise(std::uint64_t seed, std::uint64_t stream)
    : engine_(make_engine(seed, stream)) {}

double GumbelNoise::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GumbelNoise::gumbel() {
  const double u = std::clamp(uniform(), kUniformClamp, 1.0 - kUniformClamp);
  return -std::log(-std::log(u));
}

GumbelSample gumbel_softmax(std::span<const double> logits, double temperature, GumbelNoise& noise) {
  if (logits.empty()) throw EmptyLogits();
  if (!(temperature > 0.0)) throw NonPositiveTemperature(temperature);

  GumbelSample out;
  out.temperature = temperature;
  out.relaxed.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.relaxed[k] = (logits[k] + noise.gumbel()) / temperature;
  }
  // argmax of the perturbed logits is the hard sample; softmax preserves it.
  const auto top = std::max_element(out.relaxed.begin(), out.relaxed.end());
  out.hard_index = static_cast<std::size_t>(top - out.relaxed.begin());
  const double shift = *top;
  double sum = 0.0;
  for (double& v : out.relaxed) {
    v = std::exp(v - shift);
    sum += v;
  }
  for (double& v : out.relaxed) v /= sum;
  return out;
}

GumbelSample gumbel_softmax(std::span<const double> logits, double temperature,
                            std::uint64_t rng_seed) {
  GumbelNoise noise(rng_seed);
  return gumbel_softmax(logits, temperature, noise);
}

StraightThrough straight_through(const GumbelSample& sample) {
  StraightThrough st;
  st.forward.assign(sample.relaxed.size(), 0.0);
  if (!st.forward.empty()) st.forward[sample.hard_index] = 1.0;
  st.surrogate = sample.relaxed;
  return st;
}

GumbelFrequencies sample_frequencies(std::span<const double> logits, double temperature,
                                     std::size_t draws, std::uint64_t seed) {
  GumbelFrequencies out;
  out.frequencies.assign(logits.size(), 0.0);
  std::vector<std::size_t> counts(logits.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) {
    GumbelNoise noise(seed, i);
    const GumbelSample s = gumbel_softmax(logits, temperature, noise);
    ++counts[s.hard_index];
    double sum = 0.0;
    for (double v : s.relaxed) sum += v;
    out.max_sum_error = std::max(out.max_sum_error, std::abs(sum - 1.0));
    out.min_max_entry =
        std::min(out.min_max_entry, *std::max_element(s.relaxed.begin(), s.relaxed.end()));
  }
  if (draws > 0) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      out.frequencies[k] = static_cast<double>(counts[k]) / static_cast<double>(draws);
    }
  }
  return out;
}

}  // namespace metaseg
