#include "matframe/generate.hpp"

#include <cmath>

#include "matframe/quiver.hpp"
#include "matframe/solver.hpp"

namespace matframe {

MatrixFrame random_gaussian_frame(Index d, std::span<const Index> widths, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> blocks;
  blocks.reserve(widths.size());
  for (Index w : widths) {
    Matrix x(d, w);
    for (Index c = 0; c < w; ++c)
      for (Index r = 0; r < d; ++r) x(r, c) = normal(rng);
    blocks.push_back(std::move(x));
  }
  return MatrixFrame(d, std::move(blocks));
}

MatrixFrame random_weighted_pmf(Index d, std::span<const Index> widths, const WeightVector& weights,
                                Rng& rng) {
  const FrameDatum datum(random_gaussian_frame(d, widths, rng), weights);
  SolverConfig config;
  config.grad_tol = 1e-12 * static_cast<double>(d);
  const SolveResult result = minimize(datum, config);
  if (result.status != SolveStatus::kConverged)
    throw PreconditionError("weights are not in radial-isotropy range for this shape (status " +
                            std::string(to_string(result.status)) + ")");
  const MatrixFrame rif = transform_to_rif(datum, result);
  std::vector<Matrix> blocks;
  for (const Matrix& x : rif.blocks()) blocks.emplace_back(x / x.norm());
  return MatrixFrame(d, std::move(blocks));
}

MatrixFrame random_equal_norm_pmf(Index d, std::span<const Index> widths, Rng& rng) {
  const auto n = static_cast<long long>(widths.size());
  const MatrixFrame unit =
      random_weighted_pmf(d, widths, WeightVector::Uniform(widths.size(), d, n), rng);
  const double scale = std::sqrt(static_cast<double>(d) / static_cast<double>(n));
  std::vector<Matrix> blocks;
  for (const Matrix& x : unit.blocks()) blocks.emplace_back(scale * x);
  return MatrixFrame(d, std::move(blocks));
}

NearPmf perturb_to_nearness(const MatrixFrame& pmf, double target_epsilon, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> direction;
  for (const Matrix& x : pmf.blocks()) {
    Matrix h(x.rows(), x.cols());
    for (Index c = 0; c < h.cols(); ++c)
      for (Index r = 0; r < h.rows(); ++r) h(r, c) = normal(rng);
    direction.push_back(std::move(h));
  }
  auto at = [&](double s) {
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < pmf.size(); ++i) blocks.emplace_back(pmf.block(i) + s * direction[i]);
    return MatrixFrame(pmf.dim(), std::move(blocks));
  };

  double lo = 0.0, hi = 1e-3;
  while (nearness(at(hi)).epsilon < target_epsilon && hi < 1e3) hi *= 2.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (nearness(at(mid)).epsilon <= target_epsilon)
      lo = mid;
    else
      hi = mid;
  }
  MatrixFrame out = at(lo);
  const double eps = nearness(out).epsilon;
  return {std::move(out), eps};
}

}  // namespace matframe
