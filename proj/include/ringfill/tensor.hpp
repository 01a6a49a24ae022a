/*! @file tensor.hpp
 *  @brief Dense N-way tensor with both matricization conventions.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ringfill {

using Shape = std::vector<std::size_t>;

//! "2x3x4" style rendering, used in diagnostics.
inline std::string format_shape(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k > 0) os << 'x';
    os << shape[k];
  }
  return os.str();
}

inline std::size_t shape_product(const Shape& shape) {
  std::size_t total = 1;
  for (std::size_t extent : shape) {
    if (extent == 0) throw std::invalid_argument("tensor extents must be positive");
    if (total > static_cast<std::size_t>(-1) / extent)
      throw std::invalid_argument("tensor size overflows size_t");
    total *= extent;
  }
  return total;
}

//! Linear position of a multi-index; the first index varies fastest.
inline std::size_t linear_index(const Shape& shape, std::span<const std::size_t> index) {
  if (index.size() != shape.size())
    throw std::invalid_argument("multi-index order does not match tensor order");
  std::size_t pos = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (index[k] >= shape[k]) throw std::out_of_range("multi-index out of range");
    pos += index[k] * stride;
    stride *= shape[k];
  }
  return pos;
}

//! Dense real N-way array. Values are stored with the first index varying
//! fastest, so the mode-1 classical unfolding is exactly the storage layout.
class DenseTensor {
public:
  DenseTensor() = default;

  explicit DenseTensor(Shape shape)
      : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
    if (shape_.empty()) throw std::invalid_argument("tensor order must be at least 1");
  }

  //! Ingestion constructor: validates length and rejects non-finite values.
  DenseTensor(Shape shape, std::vector<double> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    if (shape_.empty()) throw std::invalid_argument("tensor order must be at least 1");
    if (data_.size() != shape_product(shape_))
      throw std::invalid_argument("tensor data length does not match shape " +
                                  format_shape(shape_));
    for (double v : data_)
      if (!std::isfinite(v))
        throw std::invalid_argument("tensor values must be finite");
  }

  //! Internal factory that skips the finiteness scan. Solver iterates may
  //! legitimately overflow; the solvers run their own divergence guard.
  static DenseTensor from_parts(Shape shape, std::vector<double> values) {
    DenseTensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    if (t.shape_.empty() || t.data_.size() != shape_product(t.shape_))
      throw std::invalid_argument("tensor data length does not match shape");
    return t;
  }

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double operator[](std::size_t pos) const { return data_[pos]; }
  double& operator[](std::size_t pos) { return data_[pos]; }

  double at(std::initializer_list<std::size_t> index) const {
    return data_[linear_index(shape_, std::span(index.begin(), index.size()))];
  }
  double& at(std::initializer_list<std::size_t> index) {
    return data_[linear_index(shape_, std::span(index.begin(), index.size()))];
  }

  double frobenius_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const DenseTensor& other) const { return shape_ == other.shape_; }

private:
  Shape shape_;
  std::vector<double> data_;
};

namespace detail {

//! Precomputed strides of one unfolding. Row index is the mode index; the
//! column index is the mixed-radix combination of the retained modes, whose
//! order distinguishes the classical from the cyclic (TR) convention.
struct UnfoldLayout {
  Shape shape;
  std::size_t mode = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> col_stride;  // per mode; 0 for the row mode

  //! Retained modes in natural order: (0,..,mode-1,mode+1,..,N-1), first fastest.
  static UnfoldLayout classic(const Shape& shape, std::size_t mode) {
    UnfoldLayout l = base(shape, mode);
    std::size_t stride = 1;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      if (k == mode) continue;
      l.col_stride[k] = stride;
      stride *= shape[k];
    }
    return l;
  }

  //! Retained modes in cyclic order: (mode+1,..,N-1,0,..,mode-1), mode+1 fastest.
  static UnfoldLayout cyclic(const Shape& shape, std::size_t mode) {
    UnfoldLayout l = base(shape, mode);
    std::size_t stride = 1;
    const std::size_t n = shape.size();
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t k = (mode + step) % n;
      l.col_stride[k] = stride;
      stride *= shape[k];
    }
    return l;
  }

  //! Visits every entry as f(linear_position, row, col) in storage order.
  template <class F>
  void for_each(F&& f) const {
    const std::size_t n = shape.size();
    std::vector<std::size_t> index(n, 0);
    const std::size_t total = rows * cols;
    std::size_t row = 0;
    std::size_t col = 0;
    for (std::size_t pos = 0;; ++pos) {
      f(pos, row, col);
      if (pos + 1 == total) break;
      for (std::size_t k = 0;; ++k) {
        if (++index[k] < shape[k]) {
          if (k == mode)
            ++row;
          else
            col += col_stride[k];
          break;
        }
        index[k] = 0;
        if (k == mode)
          row = 0;
        else
          col -= col_stride[k] * (shape[k] - 1);
      }
    }
  }

private:
  static UnfoldLayout base(const Shape& shape, std::size_t mode) {
    if (mode >= shape.size())
      throw std::invalid_argument("unfold mode out of range for order " +
                                  std::to_string(shape.size()));
    UnfoldLayout l;
    l.shape = shape;
    l.mode = mode;
    l.rows = shape[mode];
    l.cols = shape_product(shape) / shape[mode];
    l.col_stride.assign(shape.size(), 0);
    return l;
  }
};

}  // namespace detail

//! Standard mode-n unfolding: rows are the mode index, columns run over the
//! remaining indices in natural order with the first one fastest.
inline Eigen::MatrixXd unfold_classic(const DenseTensor& t, std::size_t mode) {
  const auto layout = detail::UnfoldLayout::classic(t.shape(), mode);
  Eigen::MatrixXd m(layout.rows, layout.cols);
  const double* src = t.data().data();
  layout.for_each([&](std::size_t pos, std::size_t r, std::size_t c) { m(r, c) = src[pos]; });
  return m;
}

//! Cyclic mode-n unfolding used throughout TR algebra: columns run over
//! (mode+1, ..., N-1, 0, ..., mode-1) with mode+1 fastest.
inline Eigen::MatrixXd unfold_tr(const DenseTensor& t, std::size_t mode) {
  const auto layout = detail::UnfoldLayout::cyclic(t.shape(), mode);
  Eigen::MatrixXd m(layout.rows, layout.cols);
  const double* src = t.data().data();
  layout.for_each([&](std::size_t pos, std::size_t r, std::size_t c) { m(r, c) = src[pos]; });
  return m;
}

//! Inverse of unfold_classic: exact round trip for matching shapes.
inline DenseTensor fold_classic(const Eigen::MatrixXd& m, std::size_t mode, const Shape& shape) {
  const auto layout = detail::UnfoldLayout::classic(shape, mode);
  if (static_cast<std::size_t>(m.rows()) != layout.rows ||
      static_cast<std::size_t>(m.cols()) != layout.cols)
    throw std::invalid_argument("fold_classic: matrix " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not match mode-" +
                                std::to_string(mode + 1) + " unfolding of " +
                                format_shape(shape));
  std::vector<double> values(layout.rows * layout.cols);
  layout.for_each([&](std::size_t pos, std::size_t r, std::size_t c) { values[pos] = m(r, c); });
  return DenseTensor::from_parts(shape, std::move(values));
}

//! Relinearization into a new shape with the same element count; entries keep
//! their storage positions.
inline DenseTensor reshape_tensor(const DenseTensor& t, Shape new_shape) {
  if (shape_product(new_shape) != t.size())
    throw std::invalid_argument("reshape_tensor: element count mismatch (" +
                                format_shape(t.shape()) + " vs " + format_shape(new_shape) +
                                ")");
  return DenseTensor::from_parts(std::move(new_shape), t.data());
}

}  // namespace ringfill
