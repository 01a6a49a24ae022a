/*! @file tr_factors.hpp
 *  @brief Tensor-ring factor container, subchains, and full-tensor evaluation.
 */

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ringfill/rng.hpp"
#include "ringfill/tensor.hpp"

namespace ringfill {

//! Cyclic sequence of N third-order cores; core n has shape
//! rank[n] x dim[n] x rank[n+1] with rank[N] wrapping to rank[0].
class TrFactors {
public:
  explicit TrFactors(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
    const std::size_t n = cores_.size();
    if (n < 3) throw std::invalid_argument("tensor ring needs at least 3 cores");
    for (std::size_t k = 0; k < n; ++k) {
      if (cores_[k].order() != 3)
        throw std::invalid_argument("TR core " + std::to_string(k + 1) + " must be 3-way");
      const std::size_t next = (k + 1) % n;
      if (cores_[k].extent(2) != cores_[next].extent(0))
        throw std::invalid_argument(
            "TR core chain mismatch between cores " + std::to_string(k + 1) + " and " +
            std::to_string(next + 1) + ": " + format_shape(cores_[k].shape()) + " vs " +
            format_shape(cores_[next].shape()));
    }
  }

  std::size_t order() const { return cores_.size(); }

  Shape shape() const {
    Shape s(cores_.size());
    for (std::size_t k = 0; k < cores_.size(); ++k) s[k] = cores_[k].extent(1);
    return s;
  }

  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r(cores_.size());
    for (std::size_t k = 0; k < cores_.size(); ++k) r[k] = cores_[k].extent(0);
    return r;
  }

  std::size_t rank(std::size_t n) const { return cores_[n % cores_.size()].extent(0); }

  const DenseTensor& core(std::size_t n) const { return cores_.at(n); }
  const std::vector<DenseTensor>& cores() const { return cores_; }

  //! Replaces core n; the new core must keep its chain-compatible shape.
  void set_core(std::size_t n, DenseTensor core) {
    if (core.shape() != cores_.at(n).shape())
      throw std::invalid_argument("set_core: shape " + format_shape(core.shape()) +
                                  " does not match core shape " +
                                  format_shape(cores_[n].shape()));
    cores_[n] = std::move(core);
  }

private:
  std::vector<DenseTensor> cores_;
};

//! Cores with i.i.d. Gaussian entries N(0, sigma^2), sampled core by core in
//! storage order so a fixed seed reproduces the factors exactly.
inline TrFactors random_tr(const Shape& shape, const std::vector<std::size_t>& ranks,
                           double sigma, Rng& rng) {
  if (shape.size() != ranks.size())
    throw std::invalid_argument("random_tr: rank vector length must equal tensor order");
  if (shape.size() < 3) throw std::invalid_argument("random_tr: tensor order must be >= 3");
  for (std::size_t r : ranks)
    if (r == 0) throw std::invalid_argument("random_tr: TR-ranks must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("random_tr: sigma must be nonnegative");

  std::vector<DenseTensor> cores;
  cores.reserve(shape.size());
  const std::size_t n = shape.size();
  for (std::size_t k = 0; k < n; ++k) {
    DenseTensor core({ranks[k], shape[k], ranks[(k + 1) % n]});
    for (double& v : core.data()) v = rng.normal(0.0, sigma);
    cores.push_back(std::move(core));
  }
  return TrFactors(std::move(cores));
}

//! Classical mode-i unfolding specialized to third-order cores; mode 1 (index
//! i = 1) is the dimension-mode unfolding dim x (rank_left * rank_right).
inline Eigen::MatrixXd core_unfold(const DenseTensor& core, std::size_t mode) {
  if (core.order() != 3) throw std::invalid_argument("core_unfold expects a 3-way tensor");
  return unfold_classic(core, mode);
}

//! Inverse of core_unfold for the three modes of a core-shaped tensor.
inline DenseTensor fold_core(const Eigen::MatrixXd& m, std::size_t mode,
                             const std::array<std::size_t, 3>& shape) {
  return fold_classic(m, mode, Shape{shape[0], shape[1], shape[2]});
}

//! Merges every core except the n-th, in cyclic order n+1, ..., n-1.
//! Result shape: rank[n+1] x (prod of the other dims) x rank[n]; the merged
//! index runs over (i_{n+1}, ..., i_{n-1}) with i_{n+1} fastest, and slice j
//! holds the matrix product of the corresponding core slices.
inline DenseTensor subchain(const TrFactors& f, std::size_t n) {
  const std::size_t order = f.order();
  if (n >= order) throw std::invalid_argument("subchain: mode out of range");

  const std::size_t lead = f.rank((n + 1) % order);
  std::size_t merged_total = 1;
  for (std::size_t step = 1; step < order; ++step) merged_total *= f.core((n + step) % order).extent(1);

  // Ping-pong buffers so every growth step is a single GEMM between the
  // natural (first-two-modes x last-mode) matrix views.
  std::size_t cap = 0;
  {
    std::size_t merged = f.core((n + 1) % order).extent(1);
    for (std::size_t step = 2; step < order; ++step) {
      const DenseTensor& g = f.core((n + step) % order);
      merged *= g.extent(1);
      cap = std::max(cap, lead * merged * g.extent(2));
    }
  }
  std::vector<double> buf_a(f.core((n + 1) % order).data());
  std::vector<double> buf_b(cap);
  buf_a.reserve(cap);

  std::size_t merged = f.core((n + 1) % order).extent(1);
  std::size_t tail = f.core((n + 1) % order).extent(2);
  bool in_a = true;
  for (std::size_t step = 2; step < order; ++step) {
    const DenseTensor& g = f.core((n + step) % order);
    std::vector<double>& src = in_a ? buf_a : buf_b;
    std::vector<double>& dst = in_a ? buf_b : buf_a;
    dst.resize(lead * merged * g.extent(1) * g.extent(2));
    Eigen::Map<const Eigen::MatrixXd> left(src.data(), lead * merged, tail);
    Eigen::Map<const Eigen::MatrixXd> right(g.data().data(), g.extent(0),
                                            g.extent(1) * g.extent(2));
    Eigen::Map<Eigen::MatrixXd> out(dst.data(), lead * merged, g.extent(1) * g.extent(2));
    out.noalias() = left * right;
    merged *= g.extent(1);
    tail = g.extent(2);
    in_a = !in_a;
  }

  std::vector<double>& result = in_a ? buf_a : buf_b;
  result.resize(lead * merged * tail);
  return DenseTensor::from_parts({lead, merged_total, f.rank(n)}, std::move(result));
}

//! Cyclic dimension-mode unfolding of subchain(f, n): a
//! (prod of other dims) x (rank[n] * rank[n+1]) matrix whose column index
//! pairs with the dimension-mode unfolding of core n, making
//! unfold_tr(full_tensor, n) = core_unfold(core n, 1) * subchain_matrix^T
//! an exact identity.
inline Eigen::MatrixXd subchain_matrix(const TrFactors& f, std::size_t n) {
  return unfold_tr(subchain(f, n), 1);
}

//! Slow elementwise evaluation: every entry is the trace of the product of
//! the corresponding core slices. Reference route for the contraction path.
inline DenseTensor tr_full_trace(const TrFactors& f) {
  const std::size_t order = f.order();
  const Shape shape = f.shape();
  const std::size_t total = shape_product(shape);
  std::vector<double> values(total);

  using StridedMap =
      Eigen::Map<const Eigen::MatrixXd, Eigen::Unaligned, Eigen::OuterStride<>>;
  auto slice = [&](std::size_t k, std::size_t ik) {
    const DenseTensor& g = f.core(k);
    const std::size_t r0 = g.extent(0);
    const std::size_t r1 = g.extent(2);
    return StridedMap(g.data().data() + r0 * ik, r0, r1,
                      Eigen::OuterStride<>(static_cast<Eigen::Index>(r0 * g.extent(1))));
  };

  std::vector<std::size_t> index(order, 0);
  Eigen::MatrixXd acc, next;
  for (std::size_t pos = 0;; ++pos) {
    acc = slice(0, index[0]);
    for (std::size_t k = 1; k < order; ++k) {
      next.noalias() = acc * slice(k, index[k]);
      acc.swap(next);
    }
    values[pos] = acc.trace();
    if (pos + 1 == total) break;
    for (std::size_t k = 0; ++index[k] == shape[k]; ++k) index[k] = 0;
  }
  return DenseTensor::from_parts(shape, std::move(values));
}

//! Fast evaluation via one subchain and one matrix product: with n = 1 the
//! cyclic unfolding of the result coincides with the storage layout, so no
//! permutation is needed afterwards.
inline DenseTensor tr_full_contract(const TrFactors& f) {
  const Shape shape = f.shape();
  const Eigen::MatrixXd b = subchain_matrix(f, 0);
  const Eigen::MatrixXd head = core_unfold(f.core(0), 1);
  Eigen::MatrixXd full(head.rows(), b.rows());
  full.noalias() = head * b.transpose();
  std::vector<double> values(full.data(), full.data() + full.size());
  return DenseTensor::from_parts(shape, std::move(values));
}

}  // namespace ringfill
