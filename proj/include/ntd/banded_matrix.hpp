#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ntd {

using DenseVector = std::vector<double>;

/// Extents of a structured nx x ny x nz grid, x fastest.
struct GridDims {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;

  std::size_t line_size() const noexcept { return nx; }
  std::size_t plane_size() const noexcept { return nx * ny; }
  std::size_t size() const noexcept { return nx * ny * nz; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + nx * (j + ny * k);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// The seven diagonals of a 7-point stencil, ordered by column offset.
enum class Band : int {
  kLowerPlane = 0,  // -nx*ny
  kLowerLine,       // -nx
  kLowerPoint,      // -1
  kDiag,            //  0
  kUpperPoint,      // +1
  kUpperLine,       // +nx
  kUpperPlane,      // +nx*ny
};

inline constexpr std::array<Band, 7> kAllBands = {
    Band::kLowerPlane, Band::kLowerLine,  Band::kLowerPoint, Band::kDiag,
    Band::kUpperPoint, Band::kUpperLine, Band::kUpperPlane};

/// Structured-grid operator stored by diagonals.
///
/// Every band is a row-indexed array of length N: entry r of the band with
/// offset d holds A[r, r + d]. Entries whose column would leave the matrix or
/// cross a line (for +-1) or plane (for +-nx) boundary are structurally absent
/// and kept at exactly zero. Lower bands therefore carry their padding at the
/// start of each line/plane, upper bands at the end.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  explicit BandedMatrix(GridDims dims);

  /// Unit diagonal, all couplings zero.
  static BandedMatrix identity(GridDims dims);

  const GridDims& dims() const noexcept { return dims_; }
  std::size_t rows() const noexcept { return dims_.size(); }

  std::span<double> band(Band b) noexcept { return bands_[static_cast<int>(b)]; }
  std::span<const double> band(Band b) const noexcept { return bands_[static_cast<int>(b)]; }

  std::ptrdiff_t offset(Band b) const noexcept;

  /// True when the band entry at `row` couples two grid neighbours.
  bool is_structural(Band b, std::size_t row) const noexcept;

  /// Dense entry A[row, col]; zero off the stencil.
  double at(std::size_t row, std::size_t col) const noexcept;

  /// Resets every structurally absent band entry to zero.
  void clear_padding() noexcept;

  /// Coordinate MatrixMarket dump, 1-indexed, all stored entries listed explicitly.
  void write_matrix_market(std::ostream& out) const;

 private:
  GridDims dims_;
  std::array<std::vector<double>, 7> bands_;
};

/// y = A x. Rows are split into contiguous blocks, one per worker; the value
/// of every row is independent of `workers`.
void spmv(const BandedMatrix& a, std::span<const double> x, std::span<double> y, int workers = 1);
DenseVector spmv(const BandedMatrix& a, std::span<const double> x, int workers = 1);

}  // namespace ntd
