#include "ntd/reference.hpp"

#include <vector>

#include "ntd/detail/nested_kernels.hpp"
#include "ntd/errors.hpp"

namespace ntd::reference {

void spmv(const BandedMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.rows() || y.size() != a.rows()) throw DimensionError("spmv: length mismatch");
  const GridDims g = a.dims();
  for (std::size_t k = 0; k < g.nz; ++k) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t r = g.index(i, j, k);
        double s = 0.0;
        if (k > 0) s += a.band(Band::kLowerPlane)[r] * x[g.index(i, j, k - 1)];
        if (j > 0) s += a.band(Band::kLowerLine)[r] * x[g.index(i, j - 1, k)];
        if (i > 0) s += a.band(Band::kLowerPoint)[r] * x[g.index(i - 1, j, k)];
        s += a.band(Band::kDiag)[r] * x[r];
        if (i + 1 < g.nx) s += a.band(Band::kUpperPoint)[r] * x[g.index(i + 1, j, k)];
        if (j + 1 < g.ny) s += a.band(Band::kUpperLine)[r] * x[g.index(i, j + 1, k)];
        if (k + 1 < g.nz) s += a.band(Band::kUpperPlane)[r] * x[g.index(i, j, k + 1)];
        y[r] = s;
      }
    }
  }
}

namespace {

class RecursiveSolver {
 public:
  RecursiveSolver(const PreconBands& pre, const LineSolveConfig& cfg)
      : pre_(pre), cfg_(cfg), scratch_(pre.dims.nx) {}

  // Solves rows [start, start + len) at `level`; `b` is consumed.
  void solve(int level, std::size_t start, std::size_t len, double* x, double* b) {
    if (level == 1) {
      detail::solve_line(pre_, start, std::span<const double>(b, len), std::span<double>(x, len),
                         scratch_, cfg_);
      return;
    }
    lower_solve(level, start, len, x, b);
    upper_solve(level, start, len, x);
  }

 private:
  std::size_t block_size(int level) const {
    return level == 3 ? pre_.dims.plane_size() : pre_.dims.nx;
  }
  const double* lower_band(int level) const { return level == 3 ? pre_.l3.data() : pre_.l2.data(); }
  const double* upper_band(int level) const { return level == 3 ? pre_.u3.data() : pre_.u2.data(); }

  // Rows are global indices; x and b point at row `start`.
  void lower_solve(int level, std::size_t start, std::size_t len, double* x, double* b) {
    const std::size_t bs = block_size(level);
    const std::size_t blocks = len / bs;
    const std::size_t cur = ((blocks - 1) / 2) * bs;  // relative offset of the twist block
    const std::size_t next = cur + bs;
    const double* l = lower_band(level) + start;
    const double* u = upper_band(level) + start;

    // Upper half: top down to the twist.
    if (cur > 0) {
      solve(level - 1, start, bs, x, b);
      for (std::size_t i = bs; i < cur; i += bs) {
        for (std::size_t a = i; a < i + bs; ++a) b[a] -= l[a] * x[a - bs];
        solve(level - 1, start + i, bs, x + i, b + i);
      }
    }
    // Lower half: bottom up to the twist.
    if (next < len) {
      const std::size_t last = len - bs;
      solve(level - 1, start + last, bs, x + last, b + last);
      for (std::size_t i = last; i > next;) {
        i -= bs;
        for (std::size_t a = i; a < i + bs; ++a) b[a] -= u[a] * x[a + bs];
        solve(level - 1, start + i, bs, x + i, b + i);
      }
    }
    // Twist block couples to both halves.
    if (cur > 0) {
      for (std::size_t a = cur; a < next; ++a) b[a] -= l[a] * x[a - bs];
    }
    if (next < len) {
      for (std::size_t a = cur; a < next; ++a) b[a] -= u[a] * x[a + bs];
    }
    solve(level - 1, start + cur, bs, x + cur, b + cur);
  }

  // x holds the lower-sweep result on entry.
  void upper_solve(int level, std::size_t start, std::size_t len, double* x) {
    const std::size_t bs = block_size(level);
    const std::size_t blocks = len / bs;
    const std::size_t cur = ((blocks - 1) / 2) * bs;
    const std::size_t next = cur + bs;
    const double* l = lower_band(level) + start;
    const double* u = upper_band(level) + start;
    std::vector<double> xp(bs);
    std::vector<double> bp(bs);

    for (std::size_t i = cur; i > 0;) {
      i -= bs;
      for (std::size_t a = 0; a < bs; ++a) bp[a] = u[i + a] * x[i + a + bs];
      solve(level - 1, start + i, bs, xp.data(), bp.data());
      for (std::size_t a = 0; a < bs; ++a) x[i + a] -= xp[a];
    }
    for (std::size_t i = next; i < len; i += bs) {
      for (std::size_t a = 0; a < bs; ++a) bp[a] = l[i + a] * x[i + a - bs];
      solve(level - 1, start + i, bs, xp.data(), bp.data());
      for (std::size_t a = 0; a < bs; ++a) x[i + a] -= xp[a];
    }
  }

  const PreconBands& pre_;
  LineSolveConfig cfg_;
  detail::LineScratch scratch_;
};

}  // namespace

DenseVector ntd_apply(const PreconBands& pre, std::span<const double> b,
                      const LineSolveConfig& cfg) {
  if (b.size() != pre.rows()) throw DimensionError("ntd apply: length mismatch");
  DenseVector x(pre.rows(), 0.0);
  DenseVector work(b.begin(), b.end());
  RecursiveSolver solver(pre, cfg);
  solver.solve(3, 0, pre.rows(), x.data(), work.data());
  return x;
}

}  // namespace ntd::reference
