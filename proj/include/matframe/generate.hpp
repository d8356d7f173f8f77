#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "matframe/frame.hpp"

namespace matframe {

using Rng = std::mt19937_64;

/// Blocks of i.i.d. standard normal entries with the given widths.
MatrixFrame random_gaussian_frame(Index d, std::span<const Index> widths, Rng& rng);

/// Radial isotropy of a Gaussian frame, renormalized: sum c_i X_i X_i^T = I and
/// ||X_i||_F = 1 to solver precision. The weights must lie strictly inside the
/// orbit polytope of a generic frame with these widths.
MatrixFrame random_weighted_pmf(Index d, std::span<const Index> widths, const WeightVector& weights,
                                Rng& rng);

/// Equal-norm PMF: sum X_i X_i^T = I and ||X_i||_F^2 = d/n to solver precision.
MatrixFrame random_equal_norm_pmf(Index d, std::span<const Index> widths, Rng& rng);

struct NearPmf {
  MatrixFrame frame;
  double epsilon;  // measured nearness, at most the requested target
};

/// Adds a Gaussian perturbation to `pmf`, scaled by bisection so that the
/// measured nearness lands just below `target_epsilon`.
NearPmf perturb_to_nearness(const MatrixFrame& pmf, double target_epsilon, Rng& rng);

}  // namespace matframe
