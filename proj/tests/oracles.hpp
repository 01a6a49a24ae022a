/*! @file oracles.hpp
 *  @brief Independent reference implementations the tests check the library
 *         against. Everything here is written the slow, obvious way.
 */

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

#include "ringfill/mask.hpp"
#include "ringfill/rng.hpp"
#include "ringfill/tensor.hpp"
#include "ringfill/tr_factors.hpp"

namespace oracles {

using ringfill::DenseTensor;
using ringfill::Shape;
using ringfill::TrFactors;

//! Walks every multi-index of `shape` in no particular order and calls f.
template <typename F>
void for_each_index(const Shape& shape, F&& f) {
  std::vector<std::size_t> idx(shape.size(), 0);
  const std::size_t total = ringfill::shape_product(shape);
  for (std::size_t count = 0; count < total; ++count) {
    f(idx);
    for (std::size_t k = 0; k < shape.size(); ++k) {
      if (++idx[k] < shape[k]) break;
      idx[k] = 0;
    }
  }
}

//! Classic mode-n unfolding built entry by entry: row i_n, column = the
//! remaining indices in their natural order with the first one fastest.
inline Eigen::MatrixXd unfold_classic_ref(const DenseTensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  std::size_t cols = 1;
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (k != mode) cols *= shape[k];
  Eigen::MatrixXd m(shape[mode], cols);
  for_each_index(shape, [&](const std::vector<std::size_t>& idx) {
    std::size_t col = 0, stride = 1;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      if (k == mode) continue;
      col += idx[k] * stride;
      stride *= shape[k];
    }
    m(idx[mode], col) = t[ringfill::linear_index(shape, idx)];
  });
  return m;
}

//! Circular-shifted unfolding: row i_n, column = indices n+1, ..., n-1
//! (wrapping), with i_{n+1} fastest.
inline Eigen::MatrixXd unfold_tr_ref(const DenseTensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  const std::size_t order = shape.size();
  std::size_t cols = 1;
  for (std::size_t k = 0; k < order; ++k)
    if (k != mode) cols *= shape[k];
  Eigen::MatrixXd m(shape[mode], cols);
  for_each_index(shape, [&](const std::vector<std::size_t>& idx) {
    std::size_t col = 0, stride = 1;
    for (std::size_t step = 1; step < order; ++step) {
      const std::size_t k = (mode + step) % order;
      col += idx[k] * stride;
      stride *= shape[k];
    }
    m(idx[mode], col) = t[ringfill::linear_index(shape, idx)];
  });
  return m;
}

//! One element of the ring contraction: Trace(G1[i1] G2[i2] ... GN[iN]),
//! with each slice multiplied out by hand.
inline double tr_element_ref(const TrFactors& f, const std::vector<std::size_t>& idx) {
  const std::size_t order = f.order();
  // product of the lateral slices, accumulated left to right
  Eigen::MatrixXd prod;
  for (std::size_t n = 0; n < order; ++n) {
    const DenseTensor& core = f.core(n);
    Eigen::MatrixXd slice(core.extent(0), core.extent(2));
    for (std::size_t a = 0; a < core.extent(0); ++a)
      for (std::size_t b = 0; b < core.extent(2); ++b)
        slice(a, b) = core.at({a, idx[n], b});
    prod = n == 0 ? slice : Eigen::MatrixXd(prod * slice);
  }
  return prod.trace();
}

//! Full tensor from the cores, one traced slice product per entry.
inline DenseTensor tr_contract_ref(const TrFactors& f) {
  const Shape shape = f.shape();
  DenseTensor out(shape);
  for_each_index(shape, [&](const std::vector<std::size_t>& idx) {
    out[ringfill::linear_index(shape, idx)] = tr_element_ref(f, idx);
  });
  return out;
}

//! Largest entrywise difference; infinity when the dimensions disagree.
inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

//! Random tensor with entries in [-1, 1).
inline DenseTensor random_tensor(const Shape& shape, ringfill::Rng& rng) {
  DenseTensor t(shape);
  for (std::size_t p = 0; p < t.size(); ++p) t[p] = 2.0 * rng.uniform01() - 1.0;
  return t;
}

//! Random small TR factor set with per-position ranks in [1, max_rank].
inline TrFactors random_factors(ringfill::Rng& rng, std::size_t order,
                                std::size_t max_extent = 6, std::size_t max_rank = 4) {
  Shape shape(order);
  std::vector<std::size_t> ranks(order);
  for (std::size_t k = 0; k < order; ++k) {
    shape[k] = 1 + rng.below(max_extent);
    ranks[k] = 1 + rng.below(max_rank);
  }
  return ringfill::random_tr(shape, ranks, 1.0, rng);
}

}  // namespace oracles
