#pragma once

// Central finite-difference checks for the analytic loss gradients.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace metaseg {

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradCheckTolerance = 1e-5;

/// |analytic - numeric| / max(|analytic|, |numeric|, floor). The floor keeps
/// entries that are zero up to rounding from dominating the report.
double relative_error(double analytic, double numeric, double floor = 1e-4);

/// Perturbs each coordinate of `x` by +-step and compares the central
/// difference of `f` with `analytic`. Returns the largest relative error.
double max_gradient_error(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x, std::span<const double> analytic,
                          double step = kFiniteDifferenceStep);

struct GradCheckReport {
  std::size_t cases = 0;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;

  bool passed(double tol = kGradCheckTolerance) const { return max_rel_error < tol; }
};

/// Random batches with T <= 8, N <= 6, D <= 16; gradients w.r.t. every
/// state and instruction coordinate.
GradCheckReport gradcheck_contrastive(std::size_t cases, std::uint64_t seed);

/// Random logits with S <= 8, K <= 12.
GradCheckReport gradcheck_cross_entropy(std::size_t cases, std::uint64_t seed);

}  // namespace metaseg
