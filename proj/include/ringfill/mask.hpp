/*! @file mask.hpp
 *  @brief Observation masks and the P_observed / P_missing projections.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ringfill/rng.hpp"
#include "ringfill/tensor.hpp"

namespace ringfill {

enum class Selection { Observed, Missing };

//! Boolean indicator over a tensor's index set; true marks an observed entry.
class ObservationMask {
public:
  ObservationMask(Shape shape, std::vector<std::uint8_t> flags)
      : shape_(std::move(shape)), flags_(std::move(flags)) {
    if (shape_.empty()) throw std::invalid_argument("mask order must be at least 1");
    if (flags_.size() != shape_product(shape_))
      throw std::invalid_argument("mask flag count does not match shape " +
                                  format_shape(shape_));
    observed_ = 0;
    for (std::uint8_t f : flags_) {
      if (f > 1) throw std::invalid_argument("mask flags must be 0 or 1");
      observed_ += f;
    }
  }

  static ObservationMask all_observed(Shape shape) {
    std::vector<std::uint8_t> flags(shape_product(shape), 1);
    return ObservationMask(std::move(shape), std::move(flags));
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return flags_.size(); }
  std::size_t observed_count() const { return observed_; }
  std::size_t missing_count() const { return flags_.size() - observed_; }
  double missing_rate() const {
    return 1.0 - static_cast<double>(observed_) / static_cast<double>(flags_.size());
  }

  bool is_observed(std::size_t pos) const { return flags_[pos] != 0; }
  const std::vector<std::uint8_t>& flags() const { return flags_; }

private:
  Shape shape_;
  std::vector<std::uint8_t> flags_;
  std::size_t observed_ = 0;
};

//! Draws exactly round((1 - missing_rate) * size) observed positions,
//! uniformly without replacement. Deterministic for a given rng state.
inline ObservationMask sample_mask(const Shape& shape, double missing_rate, Rng& rng) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0))
    throw std::invalid_argument("missing_rate must lie in [0, 1)");
  const std::size_t total = shape_product(shape);
  const auto observed =
      static_cast<std::size_t>(std::llround((1.0 - missing_rate) * static_cast<double>(total)));

  std::vector<std::uint8_t> flags(total, 0);
  if (observed >= total) {
    std::fill(flags.begin(), flags.end(), std::uint8_t{1});
  } else {
    // Partial Fisher-Yates over the index range.
    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < observed; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
      std::swap(pool[i], pool[j]);
      flags[pool[i]] = 1;
    }
  }
  return ObservationMask(shape, std::move(flags));
}

//! Keeps the selected entries and zeroes the rest, so that
//! project(x, m, Observed) + project(x, m, Missing) == x exactly.
inline DenseTensor project(const DenseTensor& x, const ObservationMask& mask, Selection keep) {
  if (x.shape() != mask.shape())
    throw std::invalid_argument("project: tensor shape " + format_shape(x.shape()) +
                                " does not match mask shape " + format_shape(mask.shape()));
  std::vector<double> values(x.size(), 0.0);
  const bool want_observed = keep == Selection::Observed;
  for (std::size_t p = 0; p < x.size(); ++p)
    if (mask.is_observed(p) == want_observed) values[p] = x[p];
  return DenseTensor::from_parts(x.shape(), std::move(values));
}

}  // namespace ringfill
