/*! @file test_tr_algebra.cpp
 *  @brief Ring factors, subchains, and the two full-contraction routes.
 */

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ringfill/spectral.hpp"
#include "ringfill/tr_factors.hpp"

using namespace ringfill;

TEST(TrFactorsTest, ChainValidation) {
  auto core = [](std::size_t a, std::size_t i, std::size_t b) {
    return DenseTensor(Shape{a, i, b});
  };
  EXPECT_NO_THROW(TrFactors({core(2, 3, 4), core(4, 3, 3), core(3, 3, 2)}));
  // broken link between cores 2 and 3
  EXPECT_THROW(TrFactors({core(2, 3, 4), core(4, 3, 3), core(4, 3, 2)}),
               std::invalid_argument);
  // ring must close
  EXPECT_THROW(TrFactors({core(2, 3, 4), core(4, 3, 3), core(3, 3, 5)}),
               std::invalid_argument);
  EXPECT_THROW(TrFactors({core(2, 3, 2), core(2, 3, 2)}), std::invalid_argument);
  EXPECT_THROW(TrFactors({core(2, 3, 2), DenseTensor(Shape{2, 3}), core(2, 3, 2)}),
               std::invalid_argument);
}

TEST(TrFactorsTest, AccessorsAndSetCore) {
  Rng rng(3);
  TrFactors f = random_tr({4, 5, 6}, {2, 3, 2}, 1.0, rng);
  EXPECT_EQ(f.order(), 3u);
  EXPECT_EQ(f.shape(), (Shape{4, 5, 6}));
  EXPECT_EQ(f.ranks(), (std::vector<std::size_t>{2, 3, 2}));
  EXPECT_EQ(f.rank(3), 2u);  // wraps around
  EXPECT_EQ(f.core(1).shape(), (Shape{3, 5, 2}));
  EXPECT_THROW(f.set_core(0, DenseTensor(Shape{2, 4, 2})), std::invalid_argument);
  DenseTensor replacement(Shape{2, 4, 3});
  EXPECT_NO_THROW(f.set_core(0, replacement));
}

TEST(TrFactorsTest, RandomTrIsSeedDeterministic) {
  Rng a(99), b(99), c(100);
  TrFactors fa = random_tr({3, 3, 3}, {2, 2, 2}, 0.5, a);
  TrFactors fb = random_tr({3, 3, 3}, {2, 2, 2}, 0.5, b);
  TrFactors fc = random_tr({3, 3, 3}, {2, 2, 2}, 0.5, c);
  EXPECT_EQ(fa.core(2).data(), fb.core(2).data());
  EXPECT_NE(fa.core(0).data(), fc.core(0).data());
}

TEST(CoreUnfoldTest, RoundTripsAllThreeModes) {
  Rng rng(5);
  DenseTensor core = oracles::random_tensor({2, 5, 3}, rng);
  for (std::size_t mode = 0; mode < 3; ++mode) {
    Eigen::MatrixXd m = core_unfold(core, mode);
    EXPECT_EQ(oracles::max_abs_diff(m, oracles::unfold_classic_ref(core, mode)), 0.0);
    DenseTensor back = fold_core(m, mode, {2, 5, 3});
    EXPECT_EQ(back.data(), core.data());
  }
  EXPECT_THROW(core_unfold(oracles::random_tensor({2, 2}, rng), 0), std::invalid_argument);
}

TEST(SubchainTest, ShapeFollowsRemainingChain) {
  Rng rng(7);
  // ranks (2,3,2) on a 2x4x2 tensor: dropping core n leaves a 3-way tensor
  // bounded by the two ring links at the gap
  TrFactors f = random_tr({2, 4, 2}, {2, 3, 2}, 1.0, rng);
  EXPECT_EQ(subchain(f, 0).shape(), (Shape{3, 8, 2}));
  EXPECT_EQ(subchain(f, 1).shape(), (Shape{2, 4, 3}));
  EXPECT_EQ(subchain(f, 2).shape(), (Shape{2, 8, 2}));
}

TEST(SubchainTest, EntriesMatchSliceProducts) {
  Rng rng(11);
  TrFactors f = oracles::random_factors(rng, 4);
  const Shape shape = f.shape();
  for (std::size_t n = 0; n < 4; ++n) {
    DenseTensor sc = subchain(f, n);
    // walk the retained modes n+1, ..., n-1 and multiply slices by hand
    Shape rest;
    for (std::size_t step = 1; step < 4; ++step) rest.push_back(shape[(n + step) % 4]);
    oracles::for_each_index(rest, [&](const std::vector<std::size_t>& ridx) {
      Eigen::MatrixXd prod;
      for (std::size_t step = 1; step < 4; ++step) {
        const DenseTensor& core = f.core((n + step) % 4);
        Eigen::MatrixXd slice(core.extent(0), core.extent(2));
        for (std::size_t a = 0; a < core.extent(0); ++a)
          for (std::size_t b = 0; b < core.extent(2); ++b)
            slice(a, b) = core.at({a, ridx[step - 1], b});
        prod = step == 1 ? slice : Eigen::MatrixXd(prod * slice);
      }
      std::size_t j = 0, stride = 1;
      for (std::size_t k = 0; k < 3; ++k) {
        j += ridx[k] * stride;
        stride *= rest[k];
      }
      for (std::size_t a = 0; a < sc.extent(0); ++a)
        for (std::size_t b = 0; b < sc.extent(2); ++b)
          EXPECT_NEAR(sc.at({a, j, b}), prod(a, b), 1e-12);
    });
  }
}

TEST(FullContractionTest, TraceRouteMatchesReference) {
  Rng rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    TrFactors f = oracles::random_factors(rng, 3 + rng.below(3), 4, 3);
    DenseTensor via_trace = tr_full_trace(f);
    DenseTensor ref = oracles::tr_contract_ref(f);
    ASSERT_EQ(via_trace.shape(), ref.shape());
    for (std::size_t p = 0; p < ref.size(); ++p)
      EXPECT_NEAR(via_trace[p], ref[p], 1e-11);
  }
}

TEST(FullContractionTest, FastRouteMatchesTraceRoute) {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    TrFactors f = oracles::random_factors(rng, 3 + rng.below(3));
    DenseTensor fast = tr_full_contract(f);
    DenseTensor slow = tr_full_trace(f);
    ASSERT_EQ(fast.shape(), slow.shape());
    double diff = 0, norm = 0;
    for (std::size_t p = 0; p < fast.size(); ++p) {
      diff += (fast[p] - slow[p]) * (fast[p] - slow[p]);
      norm += slow[p] * slow[p];
    }
    EXPECT_LE(std::sqrt(diff), 1e-10 * std::max(1.0, std::sqrt(norm)));
  }
}

TEST(FullContractionTest, UnfoldingFactorsThroughSubchain) {
  // the mode-n circular unfolding of the contraction equals
  // (core n unfolded at its middle mode) times the subchain matrix transposed
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    TrFactors f = oracles::random_factors(rng, 3 + rng.below(3));
    DenseTensor full = tr_full_contract(f);
    for (std::size_t n = 0; n < f.order(); ++n) {
      Eigen::MatrixXd lhs = unfold_tr(full, n);
      Eigen::MatrixXd rhs = core_unfold(f.core(n), 1) * subchain_matrix(f, n).transpose();
      EXPECT_LE(oracles::max_abs_diff(lhs, rhs),
                1e-10 * (1.0 + lhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(FullContractionTest, UnfoldingRankBoundedByCoreRank) {
  // every classic unfolding of the contraction is at most as full-rank as the
  // matching core's middle-mode unfolding
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    TrFactors f = oracles::random_factors(rng, 3, 5, 4);
    DenseTensor full = tr_full_contract(f);
    for (std::size_t n = 0; n < 3; ++n) {
      EXPECT_LE(numerical_rank(unfold_classic(full, n)),
                numerical_rank(core_unfold(f.core(n), 1)));
    }
  }
}

TEST(RandomTrTest, RejectsBadArguments) {
  Rng rng(29);
  EXPECT_THROW(random_tr({3, 3}, {2, 2}, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(random_tr({3, 3, 3}, {2, 2}, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(random_tr({3, 3, 3}, {2, 0, 2}, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(random_tr({3, 3, 3}, {2, 2, 2}, -1.0, rng), std::invalid_argument);
}
