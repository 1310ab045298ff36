#pragma once

#include <span>
#include <vector>

namespace ntd {

enum class Sweep { kForward, kBackward };

/// Default lane count: four doubles per 256-bit register.
inline constexpr int kDefaultLanes = 4;

/// First-order recurrence of a bidiagonal solve.
///
/// Forward:  x[i] = (rhs[i] - offdiag[i] * x[i-1]) * diag_recip[i], x[-1] = seed
/// Backward: x[i] = (rhs[i] - offdiag[i] * x[i+1]) * diag_recip[i], x[L] = seed
///
/// `offdiag[i]` is the coupling stored on row i. An empty `diag_recip` means a
/// unit diagonal. `rhs` and `x` may alias.
struct BidiagonalSystem {
  std::span<const double> diag_recip;
  std::span<const double> offdiag;
};

/// Plain sequential substitution.
void sequential_bidiagonal_solve(const BidiagonalSystem& sys, std::span<const double> rhs,
                                 std::span<double> x, Sweep dir, double seed = 0.0);

/// Lane-parallel substitution by coefficient chaining.
///
/// The segment is cut into `lanes` contiguous chunks. Every chunk expresses
/// its unknowns as x[i] = a[i] * y + b[i] in terms of the value y that
/// precedes the chunk, all chunks advancing in lock step. A short pass over
/// the chunk boundaries then fixes each y, and a final vectorisable pass
/// evaluates the affine forms. The first chunk starts from the known seed and
/// runs the sequential recurrence, so lanes == 1 reproduces
/// sequential_bidiagonal_solve bit for bit. Segments shorter than 2 * lanes
/// fall back to the sequential form.
///
/// `scratch` must hold at least rhs.size() values.
void chain_bidiagonal_solve(const BidiagonalSystem& sys, std::span<const double> rhs,
                            std::span<double> x, Sweep dir, int lanes, double seed,
                            std::span<double> scratch);

/// Allocating convenience overload.
std::vector<double> chain_bidiagonal_solve(std::span<const double> diag_recip,
                                           std::span<const double> offdiag,
                                           std::span<const double> rhs, Sweep dir,
                                           int lanes = kDefaultLanes, double seed = 0.0);

}  // namespace ntd

namespace ntd {

/// How the innermost (pointwise) bidiagonal sweeps are evaluated.
enum class BaseCase { kChain, kSequential };

struct LineSolveConfig {
  BaseCase base = BaseCase::kChain;
  int lanes = kDefaultLanes;
};

}  // namespace ntd
