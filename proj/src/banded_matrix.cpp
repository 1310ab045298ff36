#include "ntd/banded_matrix.hpp"

#include <omp.h>

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

#include "ntd/errors.hpp"

namespace ntd {

BandedMatrix::BandedMatrix(GridDims dims) : dims_(dims) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
    throw DimensionError("grid extents must be positive");
  }
  for (auto& b : bands_) b.assign(dims.size(), 0.0);
}

BandedMatrix BandedMatrix::identity(GridDims dims) {
  BandedMatrix a(dims);
  std::ranges::fill(a.band(Band::kDiag), 1.0);
  return a;
}

std::ptrdiff_t BandedMatrix::offset(Band b) const noexcept {
  const auto nx = static_cast<std::ptrdiff_t>(dims_.nx);
  const auto nxy = static_cast<std::ptrdiff_t>(dims_.plane_size());
  switch (b) {
    case Band::kLowerPlane: return -nxy;
    case Band::kLowerLine: return -nx;
    case Band::kLowerPoint: return -1;
    case Band::kDiag: return 0;
    case Band::kUpperPoint: return 1;
    case Band::kUpperLine: return nx;
    case Band::kUpperPlane: return nxy;
  }
  return 0;
}

bool BandedMatrix::is_structural(Band b, std::size_t row) const noexcept {
  const std::size_t i = row % dims_.nx;
  const std::size_t j = (row / dims_.nx) % dims_.ny;
  const std::size_t k = row / dims_.plane_size();
  switch (b) {
    case Band::kLowerPlane: return k > 0;
    case Band::kLowerLine: return j > 0;
    case Band::kLowerPoint: return i > 0;
    case Band::kDiag: return true;
    case Band::kUpperPoint: return i + 1 < dims_.nx;
    case Band::kUpperLine: return j + 1 < dims_.ny;
    case Band::kUpperPlane: return k + 1 < dims_.nz;
  }
  return false;
}

double BandedMatrix::at(std::size_t row, std::size_t col) const noexcept {
  const auto d = static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(row);
  double v = 0.0;
  // Offsets coincide on degenerate grids (nx == 1 makes +-1 and +-nx equal);
  // only the structural band can be nonzero there.
  for (Band b : kAllBands) {
    if (offset(b) == d && is_structural(b, row)) v += bands_[static_cast<int>(b)][row];
  }
  return v;
}

void BandedMatrix::clear_padding() noexcept {
  for (Band b : kAllBands) {
    auto& v = bands_[static_cast<int>(b)];
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (!is_structural(b, r)) v[r] = 0.0;
    }
  }
}

void BandedMatrix::write_matrix_market(std::ostream& out) const {
  std::size_t nnz = 0;
  for (Band b : kAllBands) {
    for (std::size_t r = 0; r < rows(); ++r) nnz += is_structural(b, r) ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << rows() << ' ' << rows() << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (Band b : kAllBands) {
      if (!is_structural(b, r)) continue;
      const auto col = static_cast<std::ptrdiff_t>(r) + offset(b);
      out << r + 1 << ' ' << col + 1 << ' ' << bands_[static_cast<int>(b)][r] << '\n';
    }
  }
}

namespace {

// Rows [first, last) of y = A x. The summation order is fixed (ascending
// offset) so the value of a row never depends on how rows are partitioned.
void spmv_rows(const BandedMatrix& a, const double* x, double* y, std::size_t first,
               std::size_t last) {
  const GridDims& g = a.dims();
  const std::size_t nx = g.nx;
  const std::size_t nxy = g.plane_size();
  const double* lp = a.band(Band::kLowerPlane).data();
  const double* ll = a.band(Band::kLowerLine).data();
  const double* lq = a.band(Band::kLowerPoint).data();
  const double* dg = a.band(Band::kDiag).data();
  const double* uq = a.band(Band::kUpperPoint).data();
  const double* ul = a.band(Band::kUpperLine).data();
  const double* up = a.band(Band::kUpperPlane).data();

  std::size_t i = first % nx;
  std::size_t j = (first / nx) % g.ny;
  std::size_t k = first / nxy;
  for (std::size_t r = first; r < last; ++r) {
    double s = 0.0;
    if (k > 0) s += lp[r] * x[r - nxy];
    if (j > 0) s += ll[r] * x[r - nx];
    if (i > 0) s += lq[r] * x[r - 1];
    s += dg[r] * x[r];
    if (i + 1 < nx) s += uq[r] * x[r + 1];
    if (j + 1 < g.ny) s += ul[r] * x[r + nx];
    if (k + 1 < g.nz) s += up[r] * x[r + nxy];
    y[r] = s;
    if (++i == nx) {
      i = 0;
      if (++j == g.ny) {
        j = 0;
        ++k;
      }
    }
  }
}

}  // namespace

void spmv(const BandedMatrix& a, std::span<const double> x, std::span<double> y, int workers) {
  const std::size_t n = a.rows();
  if (x.size() != n || y.size() != n) {
    throw DimensionError("spmv: vector length " + std::to_string(x.size()) + "/" +
                         std::to_string(y.size()) + " does not match " + std::to_string(n) +
                         " rows");
  }
  const int nthreads = std::max(1, workers);
#pragma omp parallel num_threads(nthreads) if (nthreads > 1)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t first = n * t / nt;
    const std::size_t last = n * (t + 1) / nt;
    spmv_rows(a, x.data(), y.data(), first, last);
  }
}

DenseVector spmv(const BandedMatrix& a, std::span<const double> x, int workers) {
  DenseVector y(a.rows());
  spmv(a, x, y, workers);
  return y;
}

}  // namespace ntd
