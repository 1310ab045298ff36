#pragma once

// Serial reference implementations kept for testing and benchmarking the
// parallel kernels against.

#include <span>

#include "ntd/banded_matrix.hpp"
#include "ntd/chain_solve.hpp"
#include "ntd/ntd_factor.hpp"

namespace ntd::reference {

/// y = A x by a plain loop over grid cells and their neighbours.
void spmv(const BandedMatrix& a, std::span<const double> x, std::span<double> y);

/// B^-1 b by literal recursion over levels: lower sweep (upper half, lower
/// half, then the twist block), followed by the upper sweep moving outwards
/// from the twist block, recursing into the next finer level for every block.
DenseVector ntd_apply(const PreconBands& pre, std::span<const double> b,
                      const LineSolveConfig& cfg = {});

}  // namespace ntd::reference
