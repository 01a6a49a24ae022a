/*! @file trals.hpp
 *  @brief Alternating least-squares baseline for TR completion.
 *
 *  Cycles over the cores; each core update exactly minimizes the observed fit
 *  ||P_Omega(T - Psi([G]))||_F^2 with the other cores fixed. Row r of the
 *  dimension-mode unfolding of core n only touches entries whose n-th index
 *  is r, so the update decouples into one small least-squares problem per
 *  slice, built from the rows of the subchain matrix that the mask retains.
 */

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ringfill/mask.hpp"
#include "ringfill/rng.hpp"
#include "ringfill/solver.hpp"
#include "ringfill/tensor.hpp"
#include "ringfill/tr_factors.hpp"

namespace ringfill {

//! One core update. Slices without a single observed entry keep their
//! previous values; the tiny ridge keeps rank-deficient observed designs
//! solvable (the over-ranked regime routinely produces them).
inline void trals_update_mode(TrFactors& g, const DenseTensor& t, const ObservationMask& mask,
                              std::size_t n, double ridge = 1e-10) {
  if (t.shape() != mask.shape() || t.shape() != g.shape())
    throw std::invalid_argument("trals_update_mode: data/mask/factor shape mismatch");
  if (!(ridge >= 0.0)) throw std::invalid_argument("trals_update_mode: ridge must be >= 0");

  const DenseTensor& core = g.core(n);
  const std::size_t dim = core.extent(1);
  const Eigen::Index p = static_cast<Eigen::Index>(core.extent(0) * core.extent(2));

  const Eigen::MatrixXd b = subchain_matrix(g, n);

  // Bucket the observed entries by slice: subchain row index + data value.
  std::vector<std::vector<std::size_t>> rows(dim);
  std::vector<std::vector<double>> vals(dim);
  const auto layout = detail::UnfoldLayout::cyclic(t.shape(), n);
  layout.for_each([&](std::size_t pos, std::size_t row, std::size_t col) {
    if (mask.is_observed(pos)) {
      rows[row].push_back(col);
      vals[row].push_back(t[pos]);
    }
  });

  Eigen::MatrixXd g2 = core_unfold(core, 1);
  Eigen::MatrixXd a;
  Eigen::VectorXd slice_vals;
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t count = rows[r].size();
    if (count == 0) continue;

    a.resize(static_cast<Eigen::Index>(count), p);
    slice_vals.resize(static_cast<Eigen::Index>(count));
    for (std::size_t e = 0; e < count; ++e) {
      a.row(static_cast<Eigen::Index>(e)) = b.row(static_cast<Eigen::Index>(rows[r][e]));
      slice_vals[static_cast<Eigen::Index>(e)] = vals[r][e];
    }

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
    gram.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
      throw DivergenceError("least-squares update failed for core " + std::to_string(n + 1) +
                            ", slice " + std::to_string(r + 1));
    g2.row(static_cast<Eigen::Index>(r)) = ldlt.solve(a.transpose() * slice_vals).transpose();
  }

  g.set_core(n, fold_core(g2, 1, {core.extent(0), dim, core.extent(2)}));
}

//! Full ALS driver. Each sweep updates every core once (Gauss-Seidel), then
//! rebuilds X from the observed data and the current model. The history
//! reuses the common record layout: both objective fields carry the observed
//! residual norm ||P_Omega(T - Psi)||_F and mu is fixed at zero.
inline SolveResult trals_solve(
    const DenseTensor& t, const ObservationMask& mask, const std::vector<std::size_t>& ranks,
    std::size_t sweeps, Rng& rng, double tol = 1e-6, const TrFactors* init = nullptr,
    const std::function<void(const TrFactors&, const HistoryRecord&)>& callback = {}) {
  if (t.shape() != mask.shape())
    throw std::invalid_argument("completion: data shape " + format_shape(t.shape()) +
                                " does not match mask shape " + format_shape(mask.shape()));
  if (t.order() < 3)
    throw std::invalid_argument("completion: tensor order must be at least 3");
  if (mask.observed_count() == 0)
    throw std::invalid_argument("completion: mask has no observed entries");
  if (!t.all_finite())
    throw std::invalid_argument("completion: input tensor has non-finite entries");
  if (sweeps < 1) throw std::invalid_argument("trals_solve: sweeps must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("trals_solve: tol must be positive");

  TrFactors g = init != nullptr ? *init : random_tr(t.shape(), ranks, 1.0, rng);
  if (g.shape() != t.shape())
    throw std::invalid_argument("trals_solve: initial factors do not match data shape");

  const std::size_t order = g.order();
  std::vector<HistoryRecord> history;
  history.reserve(sweeps);
  DenseTensor x = project(t, mask, Selection::Observed);
  DenseTensor x_last = x;
  bool converged = false;

  for (std::size_t k = 1; k <= sweeps; ++k) {
    for (std::size_t n = 0; n < order; ++n) trals_update_mode(g, t, mask, n);

    const DenseTensor psi = tr_full_contract(g);
    if (!psi.all_finite())
      throw DivergenceError("iterate became non-finite at sweep " + std::to_string(k));

    double fit2 = 0.0;
    for (std::size_t pos = 0; pos < t.size(); ++pos) {
      if (mask.is_observed(pos)) {
        const double d = t[pos] - psi[pos];
        fit2 += d * d;
        x.data()[pos] = t[pos];
      } else {
        x.data()[pos] = psi[pos];
      }
    }

    double diff2 = 0.0;
    double norm2 = 0.0;
    for (std::size_t pos = 0; pos < x.size(); ++pos) {
      const double d = x[pos] - x_last[pos];
      diff2 += d * d;
      norm2 += x[pos] * x[pos];
    }

    HistoryRecord rec;
    rec.k = k;
    rec.lagrangian = std::sqrt(fit2);
    rec.objective = rec.lagrangian;
    rec.rel_change = norm2 > 0.0 ? std::sqrt(diff2 / norm2) : 0.0;
    rec.mu = 0.0;
    history.push_back(rec);
    if (callback) callback(g, rec);

    x_last = x;
    if (rec.rel_change < tol) {
      converged = true;
      break;
    }
  }

  const std::size_t iterations = history.size();
  return SolveResult{std::move(x), std::move(g), std::move(history), converged, iterations};
}

}  // namespace ringfill
