/*! @file test_metrics.cpp
 *  @brief Recovery-error and image-quality measures.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ringfill/metrics.hpp"
#include "ringfill/tensor.hpp"

using namespace ringfill;

TEST(RseTest, FrozenValues) {
  DenseTensor truth({2, 2}, {3.0, 0.0, 4.0, 0.0});   // norm 5
  DenseTensor est({2, 2}, {3.0, 1.0, 4.0, -1.0});    // error norm sqrt(2)
  EXPECT_DOUBLE_EQ(rse(truth, est), std::sqrt(2.0) / 5.0);
  EXPECT_DOUBLE_EQ(rse(truth, truth), 0.0);
}

TEST(RseTest, RejectsBadInput) {
  DenseTensor truth({2, 2}, {1, 2, 3, 4});
  EXPECT_THROW(rse(truth, DenseTensor({4}, {1, 2, 3, 4})), std::invalid_argument);
  DenseTensor zero({2, 2}, {0, 0, 0, 0});
  EXPECT_THROW(rse(zero, truth), std::invalid_argument);
}

TEST(PsnrTest, MatchesClosedForm) {
  // constant offset of 17 on a 3-element tensor: MSE = 289
  DenseTensor truth({3}, {10.0, 200.0, 55.0});
  DenseTensor est({3}, {27.0, 217.0, 72.0});
  EXPECT_NEAR(psnr(truth, est), 10.0 * std::log10(255.0 * 255.0 / 289.0), 1e-12);
}

TEST(PsnrTest, Sentinels) {
  DenseTensor truth({2}, {0.0, 255.0});
  // exact match -> +infinity
  EXPECT_EQ(psnr(truth, truth), std::numeric_limits<double>::infinity());
  // MSE equal to 255^2 -> exactly 0 dB
  DenseTensor off({2}, {255.0, 0.0});
  EXPECT_DOUBLE_EQ(psnr(truth, off), 0.0);
  EXPECT_THROW(psnr(truth, DenseTensor({3})), std::invalid_argument);
}
