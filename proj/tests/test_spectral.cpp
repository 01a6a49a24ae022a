/*! @file test_spectral.cpp
 *  @brief Soft singular-value shrinkage and rank measurement.
 */

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "oracles.hpp"
#include "ringfill/rng.hpp"
#include "ringfill/spectral.hpp"

using namespace ringfill;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal(0.0, 1.0);
  return m;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace

TEST(SvtTest, ShrinksEverySingularValueByBeta) {
  Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index rows = 1 + rng.below(12), cols = 1 + rng.below(12);
    Eigen::MatrixXd a = random_matrix(rows, cols, rng);
    const double beta = 0.05 + 2.0 * rng.uniform01();
    SvtOutput out = svt(a, beta);
    Eigen::VectorXd before = singular_values(a);
    Eigen::VectorXd after = singular_values(out.matrix);
    ASSERT_EQ(after.size(), before.size());
    double nuclear = 0.0;
    for (Eigen::Index k = 0; k < before.size(); ++k) {
      const double want = std::max(before[k] - beta, 0.0);
      EXPECT_NEAR(after[k], want, 1e-10);
      nuclear += want;
    }
    EXPECT_NEAR(out.nuclear_norm_after, nuclear, 1e-10);
    EXPECT_EQ(out.rank_after,
              static_cast<std::size_t>((before.array() > beta).count()));
  }
}

TEST(SvtTest, FullShrinkageGivesZero) {
  Rng rng(37);
  Eigen::MatrixXd a = random_matrix(6, 4, rng);
  const double beta = singular_values(a)[0] + 1.0;
  SvtOutput out = svt(a, beta);
  EXPECT_EQ(out.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.rank_after, 0u);
  EXPECT_EQ(out.nuclear_norm_after, 0.0);
}

TEST(SvtTest, ZeroThresholdIsIdentity) {
  Rng rng(41);
  Eigen::MatrixXd a = random_matrix(5, 7, rng);
  EXPECT_LE(oracles::max_abs_diff(svt(a, 0.0).matrix, a), 1e-12);
  EXPECT_THROW(svt(a, -0.5), std::invalid_argument);
}

TEST(SvtTest, NonexpansiveOnRandomPairs) {
  Rng rng(43);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index rows = 2 + rng.below(10), cols = 2 + rng.below(10);
    Eigen::MatrixXd a = random_matrix(rows, cols, rng);
    Eigen::MatrixXd b = random_matrix(rows, cols, rng);
    const double beta = 0.1 + rng.uniform01();
    const double lhs = (svt(a, beta).matrix - svt(b, beta).matrix).norm();
    EXPECT_LE(lhs, (a - b).norm() + 1e-12);
  }
}

TEST(SvtTest, MinimizesItsProximalObjective) {
  // svt(a, beta) should beat nearby candidates on beta*||Z||_* + 0.5||Z-A||^2
  Rng rng(47);
  Eigen::MatrixXd a = random_matrix(6, 5, rng);
  const double beta = 0.8;
  Eigen::MatrixXd z = svt(a, beta).matrix;
  auto objective = [&](const Eigen::MatrixXd& m) {
    return beta * nuclear_norm(m) + 0.5 * (m - a).squaredNorm();
  };
  const double at_solution = objective(z);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::MatrixXd perturbed = z + 0.05 * random_matrix(6, 5, rng);
    EXPECT_GE(objective(perturbed), at_solution - 1e-12);
  }
}

TEST(NuclearNormTest, MatchesSingularValueSum) {
  Rng rng(53);
  Eigen::MatrixXd a = random_matrix(8, 3, rng);
  EXPECT_NEAR(nuclear_norm(a), singular_values(a).sum(), 1e-10);
  EXPECT_EQ(nuclear_norm(Eigen::MatrixXd::Zero(4, 4)), 0.0);
}

TEST(NumericalRankTest, CountsAboveRelativeCut) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 5);
  d.diagonal() << 10.0, 1.0, 1e-3, 1e-9, 0.0;
  EXPECT_EQ(numerical_rank(d), 3u);          // default cut 1e-8 * 10
  EXPECT_EQ(numerical_rank(d, 1e-2), 2u);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(3, 4)), 0u);

  Rng rng(59);
  // outer product of rank 2, embedded in noise-free 8x6
  Eigen::MatrixXd low = random_matrix(8, 2, rng) * random_matrix(2, 6, rng);
  EXPECT_EQ(numerical_rank(low), 2u);
}
