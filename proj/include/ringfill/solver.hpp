/*! @file solver.hpp
 *  @brief Shared solver configuration, result, and history types.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringfill/tensor.hpp"
#include "ringfill/tr_factors.hpp"

namespace ringfill {

//! Thrown when an iterate stops being finite (numerical blow-up).
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! How the missing entries of the completion iterate start out.
enum class XInit {
  Zero,          //!< missing entries start at 0
  ObservedMean,  //!< missing entries start at the mean of the observed ones
};

struct SolverConfig {
  std::vector<std::size_t> ranks;  //!< TR-ranks, one per tensor mode
  double lambda = 5.0;    //!< fit weight on the observed-data term
  double mu0 = 1.0;       //!< initial augmented-Lagrangian penalty
  double mu_max = 100.0;  //!< penalty ceiling
  double rho = 1.01;      //!< per-iteration penalty growth factor
  double tol = 1e-6;      //!< stop when ||X - X_last||_F / ||X||_F drops below
  std::size_t k_max = 300;
  std::uint64_t seed = 0;       //!< factor initialization seed
  XInit x_init = XInit::Zero;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("solver config: lambda must be positive");
    if (!(mu0 > 0.0)) throw std::invalid_argument("solver config: mu0 must be positive");
    if (!(mu_max >= mu0))
      throw std::invalid_argument("solver config: mu_max must be at least mu0");
    if (!(rho > 1.0 && rho < 1.5))
      throw std::invalid_argument("solver config: rho must lie in (1, 1.5)");
    if (!(tol > 0.0)) throw std::invalid_argument("solver config: tol must be positive");
    if (k_max < 1) throw std::invalid_argument("solver config: k_max must be at least 1");
  }
};

//! One line of the iterate trace.
struct HistoryRecord {
  std::size_t k = 0;        //!< iteration number, 1-based
  double lagrangian = 0.0;  //!< augmented Lagrangian value after the iteration
  double objective = 0.0;   //!< constraint-free model objective
  double rel_change = 0.0;  //!< ||X - X_last||_F / ||X||_F
  double mu = 0.0;          //!< penalty in effect during the iteration
};

struct SolveResult {
  DenseTensor x;        //!< recovered tensor
  TrFactors factors;    //!< final TR cores
  std::vector<HistoryRecord> history;
  bool converged = false;
  std::size_t iterations = 0;
};

}  // namespace ringfill
