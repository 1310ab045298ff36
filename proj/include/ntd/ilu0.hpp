#pragma once

#include <span>

#include "ntd/banded_matrix.hpp"

namespace ntd {

/// Zero-fill incomplete LU of blkdiag(A[0:M, 0:M], A[M:N, M:N]), M = floor(N/2).
///
/// Stored in place on the seven bands: the strictly lower bands hold L (unit
/// diagonal implied), the diagonal and upper bands hold U. Couplings that
/// cross the split are zero.
struct ILU0Factors {
  std::size_t split = 0;
  BandedMatrix lu;

  std::size_t rows() const noexcept { return lu.rows(); }
};

/// The two diagonal blocks are factored independently, concurrently when
/// workers > 1. Throws FactorizationError on a zero pivot.
ILU0Factors build_block_ilu0(const BandedMatrix& a, int workers = 2);

/// z = U^-1 L^-1 r, one forward and one backward sweep per half.
void ilu0_apply(const ILU0Factors& f, std::span<const double> r, std::span<double> z,
                int workers = 2);
DenseVector ilu0_apply(const ILU0Factors& f, std::span<const double> r, int workers = 2);

}  // namespace ntd
