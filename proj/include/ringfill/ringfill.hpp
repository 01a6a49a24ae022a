/*! @file ringfill.hpp
 *  @brief Convenience include for the whole library.
 */

#pragma once

#include "ringfill/io.hpp"
#include "ringfill/mask.hpp"
#include "ringfill/metrics.hpp"
#include "ringfill/parallel.hpp"
#include "ringfill/rng.hpp"
#include "ringfill/solver.hpp"
#include "ringfill/spectral.hpp"
#include "ringfill/tensor.hpp"
#include "ringfill/tr_factors.hpp"
#include "ringfill/trals.hpp"
#include "ringfill/trlrf.hpp"
