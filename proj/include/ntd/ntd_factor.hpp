#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ntd/banded_matrix.hpp"
#include "ntd/chain_solve.hpp"

namespace ntd {

/// Nested twisted filtering preconditioner
///   B = (P + L3)(I + P^-1 U3),  P = (T + L2)(I + T^-1 U2),  T = (M + L1)(I + M^-1 U1).
///
/// All arrays have length N and are row-indexed like BandedMatrix bands:
/// l_k[r] couples row r to the row one block below it (r - s_k), u_k[r] to
/// the row one block above (r + s_k), with strides s_1 = 1, s_2 = nx,
/// s_3 = nx*ny. Which of the two couplings a block row uses in the lower or
/// upper factor is decided by its position relative to the twist block.
struct PreconBands {
  GridDims dims;
  std::vector<double> l1, u1;  // off-diagonals of the line blocks T
  std::vector<double> l2, u2;  // line couplings of the plane blocks P
  std::vector<double> l3, u3;  // plane couplings, copied from A
  std::vector<double> m_recip; // reciprocals of the pointwise pivots M
  // 1-indexed twist block at each level: planes, lines per plane, points per line.
  std::size_t twist3 = 1;
  std::size_t twist2 = 1;
  std::size_t twist1 = 1;

  PreconBands() = default;
  explicit PreconBands(GridDims d);

  std::size_t rows() const noexcept { return dims.size(); }
  std::size_t memory_bytes() const noexcept;

  /// Little-endian dump: four uint64 (N, nx, ny, nz) followed by the arrays
  /// l1, u1, l2, u2, l3, u3, m_recip as float64.
  void write_binary(std::ostream& out) const;
  static PreconBands read_binary(std::istream& in);
};

/// Working copy of one tridiagonal line block.
struct LineBands {
  std::vector<double> diag, lower, upper;  // lower[a] = T[a, a-1], upper[a] = T[a, a+1]

  LineBands() = default;
  explicit LineBands(std::size_t n) : diag(n, 0.0), lower(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }
};

/// Working copy of one five-band plane block (point and line couplings).
struct PlaneBands {
  std::vector<double> diag;
  std::vector<double> lower_point, upper_point;  // -1, +1
  std::vector<double> lower_line, upper_line;    // -nx, +nx

  PlaneBands() = default;
  explicit PlaneBands(std::size_t n)
      : diag(n, 0.0), lower_point(n, 0.0), upper_point(n, 0.0), lower_line(n, 0.0),
        upper_line(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }

  /// Extracts plane `k` (the block D_k) from A.
  static PlaneBands from_matrix(const BandedMatrix& a, std::size_t k);
};

/// Middle block where the two elimination sweeps meet: floor((n - 1) / 2) + 1.
std::size_t twist_index(std::size_t num_blocks);

/// Applies an approximate inverse of a neighbouring block: out = B^-1 in.
using ApplyInverse = std::function<void(std::span<const double> in, std::span<double> out)>;

/// Diagonal filter correction for a block coupling with diagonal `coupling`:
/// beta[k] = (B^-1 (coupling o 1))[k] / coupling[k], and 0 where coupling[k] == 0.
/// Throws FactorizationError (tagged with `level`, `block`) on non-finite values.
std::vector<double> compute_beta(const ApplyInverse& apply_inv, std::span<const double> coupling,
                                 int level = 0, std::size_t block = 0);

/// Twisted pivots of one tridiagonal line, written as reciprocals.
/// `twist` is 1-indexed. `first_row` only labels errors.
void factor_level1(std::span<const double> diag, std::span<const double> lower,
                   std::span<const double> upper, std::size_t twist, std::span<double> m_recip,
                   std::size_t first_row = 0);
std::vector<double> factor_level1(const LineBands& line, std::size_t twist);

/// Factors plane block `plane_index` (holding the current P_k) into the line
/// level: fills l1, u1, m_recip and l2, u2 of `pre` over the plane's rows.
/// `pre.dims` and the twist fields must already be set. When `t_diag` is
/// non-empty it receives the diagonals of the line blocks T (length nx*ny).
void factor_level2(const PlaneBands& plane, std::size_t plane_index, PreconBands& pre,
                   const LineSolveConfig& cfg = {}, std::span<double> t_diag = {});

/// Optional by-products of factor_level3, used for diagnostics.
struct FactorTrace {
  std::vector<double> t_diag;  // diagonals of every line block T, length N
};

/// Full three-level factorisation. Up to two workers run the twisted halves
/// of the plane recurrence concurrently; output does not depend on `workers`.
PreconBands factor_level3(const BandedMatrix& a, int workers = 1, const LineSolveConfig& cfg = {},
                          FactorTrace* trace = nullptr);

}  // namespace ntd
