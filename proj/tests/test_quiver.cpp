#include <gtest/gtest.h>

#include "matframe/polytope.hpp"
#include "matframe/quiver.hpp"
#include "matframe/solver.hpp"
#include "test_support.hpp"

namespace matframe {
namespace {

using testing::counterexample_columns;
using testing::counterexample_frame;
using testing::harmonic_frame;
using testing::identity_frame;
using testing::uniform_weights;

TEST(PmfTest, Examples) {
  EXPECT_TRUE(is_pmf({identity_frame(2), uniform_weights(2, 1, 1)}));
  EXPECT_FALSE(is_pmf({counterexample_frame(), uniform_weights(3, 2, 3)}));
  // sqrt(n/d) times an equal-norm PMF is a weighted PMF at c = d/n.
  const MatrixFrame scaled = apply_transform(std::sqrt(2.0) * Matrix::Identity(2, 2), harmonic_frame());
  EXPECT_TRUE(is_pmf({scaled, uniform_weights(4, 1, 2)}));
}

TEST(EqualNormPmfTest, Examples) {
  EXPECT_TRUE(is_equal_norm_pmf(harmonic_frame()));
  EXPECT_TRUE(is_equal_norm_pmf(identity_frame(2)));
  EXPECT_FALSE(is_equal_norm_pmf(counterexample_frame()));
}

TEST(NearnessTest, Examples) {
  const NearnessReport exact = nearness(harmonic_frame());
  EXPECT_NEAR(exact.epsilon, 0.0, 1e-15);

  std::vector<Matrix> blocks = harmonic_frame().blocks();
  blocks[0] *= std::sqrt(1.1);
  const NearnessReport bumped = nearness(MatrixFrame(2, blocks));
  EXPECT_NEAR(bumped.epsilon_norms, 0.1, 1e-14);
  EXPECT_NEAR(bumped.epsilon_operator, 0.05, 1e-14);
  EXPECT_NEAR(bumped.epsilon, 0.1, 1e-14);

  // Oracle: the eigenvalues of the bumped frame operator computed directly.
  const Vector eig =
      Eigen::SelfAdjointEigenSolver<Matrix>(frame_operator(MatrixFrame(2, blocks))).eigenvalues();
  EXPECT_NEAR(bumped.epsilon_operator, std::max(1.0 - eig.minCoeff(), eig.maxCoeff() - 1.0), 1e-15);

  EXPECT_NEAR(nearness(counterexample_frame()).epsilon_operator, 5.0, 1e-14);
}

TEST(RifTest, Examples) {
  const WeightVector split({Rational(1, 3), Rational(1, 3), Rational(2, 3), Rational(2, 3)});
  EXPECT_TRUE(is_rif({counterexample_columns(), split}));

  const FrameDatum star(counterexample_frame(), uniform_weights(3, 2, 3));
  EXPECT_FALSE(is_rif(star));
  Matrix want(2, 2);
  want << 0.8, 0, 0, 1.2;
  EXPECT_LT((rif_operator(star) - want).norm(), 1e-15);
  EXPECT_NEAR(rif_residual(star), 0.2, 1e-15);

  EXPECT_TRUE(is_rif({identity_frame(2), uniform_weights(2, 1, 1)}));

  const MatrixFrame zero(2, {Matrix::Identity(2, 2), Matrix::Zero(2, 1)});
  EXPECT_THROW(is_rif({zero, uniform_weights(2, 1, 1)}), PreconditionError);
}

TEST(QuiverRepTest, FromFrameLayout) {
  const BipartiteQuiverRep rep = BipartiteQuiverRep::FromFrame(counterexample_frame());
  EXPECT_EQ(rep.source_dims, std::vector<Index>{2});
  EXPECT_EQ(rep.sink_dims, (std::vector<Index>{1, 1, 1}));
  ASSERT_EQ(rep.arrows.size(), 4u);
  EXPECT_EQ(rep.arrows[1].sink, 0u);
  EXPECT_EQ(rep.arrows[2].sink, 1u);
  EXPECT_EQ(rep.arrows[1].map, (Matrix(1, 2) << 0, 2).finished());
  EXPECT_EQ(rep.vertex_count(), 4u);
  EXPECT_NO_THROW(rep.validate());

  BipartiteQuiverRep bad = rep;
  bad.arrows[0].map = Matrix::Zero(2, 2);
  EXPECT_THROW(bad.validate(), DimensionError);
  bad = rep;
  bad.arrows[0].sink = 7;
  EXPECT_THROW(bad.validate(), DimensionError);
}

TEST(GeometricBlTest, Examples) {
  EXPECT_TRUE(is_geometric_bl_datum(BipartiteQuiverRep::FromFrame(identity_frame(2)),
                                    uniform_weights(2, 1, 1)));
  EXPECT_FALSE(is_geometric_bl_datum(BipartiteQuiverRep::FromFrame(counterexample_frame()),
                                     uniform_weights(3, 2, 3)));
}

TEST(SigmaCriticalTest, Examples) {
  BipartiteQuiverRep zero;
  zero.source_dims = {2};
  zero.sink_dims = {1, 1};
  zero.arrows = {{0, 0, Matrix::Zero(1, 2)}, {0, 1, Matrix::Zero(1, 2)}};
  EXPECT_TRUE(is_sigma_critical(zero, {0, 0, 0}));

  const WeightVector c = uniform_weights(2, 1, 1);
  const BipartiteQuiverRep basis = BipartiteQuiverRep::FromFrame(identity_frame(2));
  const BipartiteQuiverRep w = scale_to_critical_candidate(basis, c);
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(w.arrows[a].map, basis.arrows[a].map);
  EXPECT_EQ(c.sigma(), (std::vector<BigInt>{1, -1, -1}));
  EXPECT_TRUE(is_sigma_critical(w, c.sigma()));

  const WeightVector star_c = uniform_weights(3, 2, 3);
  const BipartiteQuiverRep star = BipartiteQuiverRep::FromFrame(counterexample_frame());
  EXPECT_FALSE(is_sigma_critical(star, star_c.sigma()));
  EXPECT_FALSE(is_sigma_critical(scale_to_critical_candidate(star, star_c), star_c.sigma()));
  EXPECT_THROW(sigma_critical_residual(star, {1, 2}), DimensionError);
}

TEST(QuiverPropertyTest, PmfCorpusPredicates) {
  Rng rng(61);
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = 2 + trial % 2;
    const std::size_t n = static_cast<std::size_t>(d) + 2;
    const auto widths = testing::random_widths(n, 2, rng);
    const WeightVector c = uniform_weights(n, d, static_cast<long long>(n));
    const MatrixFrame pmf = random_weighted_pmf(d, widths, c, rng);
    const FrameDatum datum(pmf, c);
    ASSERT_TRUE(is_pmf(datum, 1e-8));
    EXPECT_TRUE(in_orbit_polytope(datum).member);
    EXPECT_TRUE(is_matrix_frame(pmf));
    const BipartiteQuiverRep rep = BipartiteQuiverRep::FromFrame(pmf);
    EXPECT_EQ(is_geometric_bl_datum(rep, c, 1e-8), is_pmf(datum, 1e-8));
    EXPECT_TRUE(is_sigma_critical(scale_to_critical_candidate(rep, c), c.sigma(), 1e-6));

    const MatrixFrame en = random_equal_norm_pmf(d, widths, rng);
    EXPECT_TRUE(is_equal_norm_pmf(en, 1e-8));
    EXPECT_LT(nearness(en).epsilon, 1e-8);
  }
}

TEST(QuiverPropertyTest, ConvergedSolvesAreRif) {
  Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixFrame f = random_gaussian_frame(3, testing::random_widths(5, 2, rng), rng);
    const FrameDatum datum(f, uniform_weights(5, 3, 5));
    const SolverConfig config;
    const SolveResult r = minimize(datum, config);
    ASSERT_EQ(r.status, SolveStatus::kConverged);
    EXPECT_TRUE(is_rif({transform_to_rif(datum, r), datum.weights},
                       10.0 * config.effective_grad_tol(3)));
  }
}

TEST(QuiverPropertyTest, NonPmfCorpusFailsBothSides) {
  Rng rng(63);
  for (int trial = 0; trial < 25; ++trial) {
    const MatrixFrame f = random_gaussian_frame(2, testing::random_widths(4, 2, rng), rng);
    const WeightVector c = uniform_weights(4, 1, 2);
    const BipartiteQuiverRep rep = BipartiteQuiverRep::FromFrame(f);
    const bool bl = is_geometric_bl_datum(rep, c, 1e-9);
    EXPECT_FALSE(bl);
    EXPECT_EQ(bl, is_sigma_critical(scale_to_critical_candidate(rep, c), c.sigma(), 1e-9));
  }
}

}  // namespace
}  // namespace matframe
