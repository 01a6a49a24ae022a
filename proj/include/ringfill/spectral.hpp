/*! @file spectral.hpp
 *  @brief Singular-value thresholding and spectral summaries used by the solver.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace ringfill {

struct SvtOutput {
  Eigen::MatrixXd matrix;       //!< shrunken reconstruction
  double nuclear_norm_after;    //!< sum of the surviving singular values
  std::size_t rank_after;       //!< number of singular values above the threshold
};

//! Soft-thresholds the spectrum: U * max(S - beta, 0) * V^T. This is the
//! proximal operator of beta * ||.||_* and therefore nonexpansive.
inline SvtOutput svt(const Eigen::MatrixXd& a, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("svt: threshold must be nonnegative");

  Eigen::BDCSVD<Eigen::MatrixXd> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = dec.singularValues();

  SvtOutput out;
  out.nuclear_norm_after = 0.0;
  out.rank_after = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s[i] = std::max(s[i] - beta, 0.0);
    if (s[i] > 0.0) {
      out.nuclear_norm_after += s[i];
      ++out.rank_after;
    }
  }
  const Eigen::Index r = static_cast<Eigen::Index>(out.rank_after);
  if (r == 0) {
    out.matrix = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  } else {
    out.matrix.noalias() = dec.matrixU().leftCols(r) * s.head(r).asDiagonal() *
                           dec.matrixV().leftCols(r).transpose();
  }
  return out;
}

//! Sum of all singular values.
inline double nuclear_norm(const Eigen::MatrixXd& a) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues().sum();
}

//! Count of singular values above rel_tol * sigma_max (0 for a zero matrix).
inline std::size_t numerical_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-8) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("numerical_rank: rel_tol must be positive");
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
  if (s.size() == 0 || s[0] <= 0.0) return 0;
  const double cut = rel_tol * s[0];
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cut) ++rank;
  return rank;
}

}  // namespace ringfill
