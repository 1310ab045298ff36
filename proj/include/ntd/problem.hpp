#pragma once

#include <array>
#include <string_view>

#include "ntd/banded_matrix.hpp"

namespace ntd {

/// Diffusion coefficient fields of the benchmark problems.
enum class CoefficientKind : int {
  kSkyscraper = 1,  // checkerboard of isolated high-permeability blocks
  kRing = 2,        // spherical shell of kappa = 1e3
  kPoisson = 3,     // kappa = 1
};

CoefficientKind coefficient_kind_from_int(int type);

using Point3 = std::array<double, 3>;

/// Uniform cell-centred grid on the unit cube.
struct GridSpec {
  GridDims dims;

  static GridSpec cube(std::size_t n) { return GridSpec{GridDims{n, n, n}}; }

  /// Cell width along each axis.
  Point3 mesh_width() const noexcept;
  /// Centre of cell (i, j, k), 0-based: ((i + 1/2) / nx, ...).
  Point3 cell_center(std::size_t i, std::size_t j, std::size_t k) const noexcept;
};

/// kappa(p) for p strictly inside (0,1)^3; throws std::domain_error otherwise.
double kappa_eval(CoefficientKind kind, const Point3& p);

/// Seven-point cell-centred finite-volume discretisation of -div(kappa grad u)
/// with homogeneous Dirichlet boundaries, multiplied through by h^2.
///
/// Interior faces carry the harmonic mean of the two adjacent cell values;
/// boundary faces carry the cell's own kappa and only feed the diagonal.
BandedMatrix assemble(const GridSpec& grid, CoefficientKind kind, int workers = 1);

enum class RhsMode {
  kOnes,              // b = 1
  kManufacturedOnes,  // b = A 1, exact solution is the all-ones vector
};

DenseVector make_rhs(const BandedMatrix& a, RhsMode mode);

}  // namespace ntd
