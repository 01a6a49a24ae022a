/*! @file metrics.hpp
 *  @brief Reconstruction quality metrics.
 */

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ringfill/tensor.hpp"

namespace ringfill {

//! Relative squared error ||truth - estimate||_F / ||truth||_F.
inline double rse(const DenseTensor& truth, const DenseTensor& estimate) {
  if (!truth.same_shape(estimate))
    throw std::invalid_argument("rse: shape mismatch: " + format_shape(truth.shape()) +
                                " vs " + format_shape(estimate.shape()));
  double diff2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - estimate[i];
    diff2 += d * d;
    ref2 += truth[i] * truth[i];
  }
  if (ref2 == 0.0)
    throw std::invalid_argument("rse: reference tensor is identically zero");
  return std::sqrt(diff2 / ref2);
}

//! Peak signal-to-noise ratio for 8-bit image data:
//! 10 * log10(255^2 / mse) with mse the mean squared entry error.
//! A perfect reconstruction maps to +infinity.
inline double psnr(const DenseTensor& truth, const DenseTensor& estimate) {
  if (!truth.same_shape(estimate))
    throw std::invalid_argument("psnr: shape mismatch: " + format_shape(truth.shape()) +
                                " vs " + format_shape(estimate.shape()));
  double sq = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - estimate[i];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(truth.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace ringfill
