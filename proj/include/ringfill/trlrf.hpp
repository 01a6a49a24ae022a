/*! @file trlrf.hpp
 *  @brief ADMM completion solver with nuclear-norm-regularized TR factors.
 *
 *  Minimizes  sum_{n,i} ||G^(n)_(i)||_*  +  (lambda/2) ||X - Psi([G])||_F^2
 *  subject to P_Omega(X) = P_Omega(T), by splitting each core into three
 *  auxiliary copies M^(n,i) (one per unfolding) with multipliers Y^(n,i).
 *  One iteration updates, in order: every core (Gauss-Seidel), every M
 *  (independent singular-value shrinkages), X, every Y, then the penalty mu.
 */

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ringfill/mask.hpp"
#include "ringfill/parallel.hpp"
#include "ringfill/solver.hpp"
#include "ringfill/spectral.hpp"
#include "ringfill/tensor.hpp"
#include "ringfill/tr_factors.hpp"

namespace ringfill {

//! Full variable set of the ADMM iteration. m[n][i] and y[n][i] always share
//! the shape of core n; after every completion update the observed entries of
//! x equal the data exactly.
struct AdmmState {
  TrFactors g;
  std::vector<std::array<DenseTensor, 3>> m;
  std::vector<std::array<DenseTensor, 3>> y;
  DenseTensor x;
  double mu = 1.0;
  std::size_t k = 0;
};

namespace detail {

inline void check_problem(const DenseTensor& t, const ObservationMask& mask) {
  if (t.shape() != mask.shape())
    throw std::invalid_argument("completion: data shape " + format_shape(t.shape()) +
                                " does not match mask shape " + format_shape(mask.shape()));
  if (t.order() < 3)
    throw std::invalid_argument("completion: tensor order must be at least 3");
  if (mask.observed_count() == 0)
    throw std::invalid_argument("completion: mask has no observed entries");
  if (!t.all_finite())
    throw std::invalid_argument("completion: input tensor has non-finite entries");
}

//! Observed entries from t, missing ones per the configured policy.
inline DenseTensor initial_x(const DenseTensor& t, const ObservationMask& mask, XInit policy) {
  DenseTensor x = project(t, mask, Selection::Observed);
  if (policy == XInit::ObservedMean) {
    double sum = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p)
      if (mask.is_observed(p)) sum += x[p];
    const double mean = sum / static_cast<double>(mask.observed_count());
    for (std::size_t p = 0; p < x.size(); ++p)
      if (!mask.is_observed(p)) x.data()[p] = mean;
  }
  return x;
}

}  // namespace detail

//! Starting state per the algorithm: cores ~ N(0,1), M = Y = 0, mu = mu0.
inline AdmmState trlrf_init(const DenseTensor& t, const ObservationMask& mask,
                            const SolverConfig& cfg) {
  cfg.validate();
  detail::check_problem(t, mask);

  Rng rng(cfg.seed);
  TrFactors g = random_tr(t.shape(), cfg.ranks, 1.0, rng);

  const std::size_t order = g.order();
  std::vector<std::array<DenseTensor, 3>> m(order);
  std::vector<std::array<DenseTensor, 3>> y(order);
  for (std::size_t n = 0; n < order; ++n)
    for (std::size_t i = 0; i < 3; ++i) {
      m[n][i] = DenseTensor(g.core(n).shape());
      y[n][i] = DenseTensor(g.core(n).shape());
    }

  return AdmmState{std::move(g), std::move(m), std::move(y),
                   detail::initial_x(t, mask, cfg.x_init), cfg.mu0, 0};
}

//! Least-squares core update: the dimension-mode unfolding of the new core is
//!   [ sum_i (mu M^(n,i)_(2) + Y^(n,i)_(2)) + lambda X_<n> B ]
//!   * (lambda B^T B + 3 mu I)^{-1},   B = subchain_matrix(g, n),
//! computed through a Cholesky solve (for mu > 0 the system is SPD).
inline void update_core(AdmmState& state, const DenseTensor& t, const ObservationMask& mask,
                        const SolverConfig& cfg, std::size_t n) {
  if (t.shape() != state.x.shape() || mask.shape() != state.x.shape())
    throw std::invalid_argument("update_core: data/mask shape does not match state");

  const DenseTensor& core = state.g.core(n);
  const std::size_t r0 = core.extent(0);
  const std::size_t dim = core.extent(1);
  const std::size_t r1 = core.extent(2);
  const Eigen::Index p = static_cast<Eigen::Index>(r0 * r1);

  const Eigen::MatrixXd b = subchain_matrix(state.g, n);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose(), cfg.lambda);
  gram.diagonal().array() += 3.0 * state.mu;

  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(dim), p);
  rhs.noalias() = cfg.lambda * (unfold_tr(state.x, n) * b);
  for (std::size_t i = 0; i < 3; ++i)
    rhs += state.mu * core_unfold(state.m[n][i], 1) + core_unfold(state.y[n][i], 1);

  const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
  if (llt.info() != Eigen::Success)
    throw DivergenceError("core update " + std::to_string(n + 1) +
                          ": normal equations lost positive definiteness");
  const Eigen::MatrixXd solved = llt.solve(rhs.transpose()).transpose();
  state.g.set_core(n, fold_core(solved, 1, {r0, dim, r1}));
}

//! Proximal step for one auxiliary core: singular-value shrinkage by 1/mu of
//! G^(n) minus the scaled multiplier, along unfolding mode i.
inline void update_aux(AdmmState& state, const SolverConfig&, std::size_t n, std::size_t i) {
  if (!(state.mu > 0.0)) throw std::invalid_argument("update_aux: penalty must be positive");
  const DenseTensor& core = state.g.core(n);
  const Eigen::MatrixXd target =
      core_unfold(core, i) - core_unfold(state.y[n][i], i) / state.mu;
  SvtOutput shrunk = svt(target, 1.0 / state.mu);
  state.m[n][i] = fold_core(shrunk.matrix, i,
                            {core.extent(0), core.extent(1), core.extent(2)});
}

//! Completion step against a precomputed model tensor: observed entries are
//! copied from t verbatim, missing ones from psi.
inline void update_completion(AdmmState& state, const DenseTensor& t,
                              const ObservationMask& mask, const DenseTensor& psi) {
  if (t.shape() != mask.shape() || psi.shape() != t.shape() || state.x.shape() != t.shape())
    throw std::invalid_argument("update_completion: shape mismatch");
  for (std::size_t p = 0; p < t.size(); ++p)
    state.x.data()[p] = mask.is_observed(p) ? t[p] : psi[p];
}

inline void update_completion(AdmmState& state, const DenseTensor& t,
                              const ObservationMask& mask, const TrFactors& factors) {
  update_completion(state, t, mask, tr_full_contract(factors));
}

//! Dual ascent for one multiplier: Y^(n,i) += mu (M^(n,i) - G^(n)).
inline void update_multipliers(AdmmState& state, const SolverConfig&, std::size_t n,
                               std::size_t i) {
  const std::vector<double>& g = state.g.core(n).data();
  const std::vector<double>& m = state.m[n][i].data();
  std::vector<double>& y = state.y[n][i].data();
  for (std::size_t p = 0; p < y.size(); ++p) y[p] += state.mu * (m[p] - g[p]);
}

//! Geometric penalty growth capped at mu_max.
inline void advance_penalty(AdmmState& state, const SolverConfig& cfg) {
  state.mu = std::min(cfg.rho * state.mu, cfg.mu_max);
}

namespace detail {

inline double fit_term(const AdmmState& state, const SolverConfig& cfg,
                       const DenseTensor& psi) {
  if (!psi.same_shape(state.x))
    throw std::invalid_argument("objective: model tensor shape mismatch");
  double sq = 0.0;
  for (std::size_t p = 0; p < psi.size(); ++p) {
    const double d = state.x[p] - psi[p];
    sq += d * d;
  }
  return 0.5 * cfg.lambda * sq;
}

}  // namespace detail

//! Augmented Lagrangian at the current state, evaluated against psi = Psi([G]).
inline double lagrangian_value(const AdmmState& state, const SolverConfig& cfg,
                               const DenseTensor& psi) {
  double value = detail::fit_term(state, cfg, psi);
  for (std::size_t n = 0; n < state.g.order(); ++n) {
    const std::vector<double>& g = state.g.core(n).data();
    for (std::size_t i = 0; i < 3; ++i) {
      value += nuclear_norm(core_unfold(state.m[n][i], i));
      const std::vector<double>& m = state.m[n][i].data();
      const std::vector<double>& y = state.y[n][i].data();
      double dual = 0.0;
      double gap2 = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double gap = m[p] - g[p];
        dual += y[p] * gap;
        gap2 += gap * gap;
      }
      value += dual + 0.5 * state.mu * gap2;
    }
  }
  return value;
}

inline double lagrangian_value(const AdmmState& state, const DenseTensor&,
                               const ObservationMask&, const SolverConfig& cfg) {
  return lagrangian_value(state, cfg, tr_full_contract(state.g));
}

//! Constraint-free model objective: sum of core-unfolding nuclear norms plus
//! the weighted fit term.
inline double model_objective(const AdmmState& state, const SolverConfig& cfg,
                              const DenseTensor& psi) {
  double value = detail::fit_term(state, cfg, psi);
  for (std::size_t n = 0; n < state.g.order(); ++n)
    for (std::size_t i = 0; i < 3; ++i)
      value += nuclear_norm(core_unfold(state.g.core(n), i));
  return value;
}

inline double model_objective(const AdmmState& state, const DenseTensor&,
                              const ObservationMask&, const SolverConfig& cfg) {
  return model_objective(state, cfg, tr_full_contract(state.g));
}

//! Gradient of the Lagrangian w.r.t. the dimension-mode unfolding of core n;
//! identically zero right after update_core (used as a stationarity probe).
inline Eigen::MatrixXd core_gradient(const AdmmState& state, const SolverConfig& cfg,
                                     std::size_t n) {
  const Eigen::MatrixXd b = subchain_matrix(state.g, n);
  const Eigen::MatrixXd g2 = core_unfold(state.g.core(n), 1);
  Eigen::MatrixXd grad = cfg.lambda * (g2 * (b.transpose() * b)) + 3.0 * state.mu * g2;
  grad.noalias() -= cfg.lambda * (unfold_tr(state.x, n) * b);
  for (std::size_t i = 0; i < 3; ++i)
    grad -= state.mu * core_unfold(state.m[n][i], 1) + core_unfold(state.y[n][i], 1);
  return grad;
}

//! Runs the full iteration until the relative change of X drops below tol or
//! the iteration cap is reached. The optional callback sees every iteration.
inline SolveResult trlrf_solve(
    const DenseTensor& t, const ObservationMask& mask, const SolverConfig& cfg,
    const std::function<void(const AdmmState&, const HistoryRecord&)>& callback = {}) {
  AdmmState state = trlrf_init(t, mask, cfg);
  const std::size_t order = state.g.order();

  std::vector<HistoryRecord> history;
  history.reserve(cfg.k_max);
  DenseTensor x_last = state.x;
  bool converged = false;

  for (std::size_t k = 1; k <= cfg.k_max; ++k) {
    for (std::size_t n = 0; n < order; ++n) update_core(state, t, mask, cfg, n);
    for (std::size_t n = 0; n < order; ++n)
      if (!state.g.core(n).all_finite())
        throw DivergenceError("core iterate became non-finite at iteration " +
                              std::to_string(k));

    parallel_for(3 * order, [&](std::size_t idx) {
      update_aux(state, cfg, idx / 3, idx % 3);
    });

    const DenseTensor psi = tr_full_contract(state.g);
    if (!psi.all_finite())
      throw DivergenceError("iterate became non-finite at iteration " + std::to_string(k));
    update_completion(state, t, mask, psi);

    for (std::size_t n = 0; n < order; ++n)
      for (std::size_t i = 0; i < 3; ++i) update_multipliers(state, cfg, n, i);
    state.k = k;

    double diff2 = 0.0;
    double norm2 = 0.0;
    for (std::size_t p = 0; p < state.x.size(); ++p) {
      const double d = state.x[p] - x_last[p];
      diff2 += d * d;
      norm2 += state.x[p] * state.x[p];
    }

    HistoryRecord rec;
    rec.k = k;
    rec.mu = state.mu;
    rec.lagrangian = lagrangian_value(state, cfg, psi);
    rec.objective = model_objective(state, cfg, psi);
    rec.rel_change = norm2 > 0.0 ? std::sqrt(diff2 / norm2) : 0.0;
    if (!std::isfinite(rec.lagrangian) || !std::isfinite(rec.objective))
      throw DivergenceError("objective became non-finite at iteration " + std::to_string(k));
    history.push_back(rec);
    if (callback) callback(state, rec);

    advance_penalty(state, cfg);
    x_last = state.x;

    if (rec.rel_change < cfg.tol) {
      converged = true;
      break;
    }
  }

  const std::size_t iterations = history.size();
  return SolveResult{std::move(state.x), std::move(state.g), std::move(history), converged,
                     iterations};
}

}  // namespace ringfill
