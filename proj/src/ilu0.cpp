#include "ntd/ilu0.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <string>

#include "ntd/errors.hpp"

namespace ntd {
namespace {

constexpr std::array<Band, 3> kLower = {Band::kLowerPlane, Band::kLowerLine, Band::kLowerPoint};
constexpr std::array<Band, 3> kUpper = {Band::kUpperPoint, Band::kUpperLine, Band::kUpperPlane};

// Row-wise IKJ elimination on rows [lo, hi), touching only stencil positions.
void factor_half(BandedMatrix& m, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i) {
    // Lower bands in ascending column order.
    for (Band bk : kLower) {
      if (!m.is_structural(bk, i)) continue;
      const std::ptrdiff_t dk = m.offset(bk);
      const auto k = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + dk);
      if (k < lo) continue;
      double& aik = m.band(bk)[i];
      aik /= m.band(Band::kDiag)[k];
      // a_ij -= a_ik a_kj for every j > k on the stencil of both rows i and k.
      for (Band bj : kAllBands) {
        const std::ptrdiff_t dj = m.offset(bj);
        if (dj <= dk || !m.is_structural(bj, i)) continue;
        const std::ptrdiff_t dkj = dj - dk;
        for (Band bkj : kUpper) {
          if (m.offset(bkj) == dkj && m.is_structural(bkj, k)) {
            m.band(bj)[i] -= aik * m.band(bkj)[k];
          }
        }
      }
    }
    const double piv = m.band(Band::kDiag)[i];
    if (piv == 0.0 || !std::isfinite(piv)) {
      throw FactorizationError("ILU0: zero or non-finite pivot at row " + std::to_string(i), 0, i);
    }
  }
}

void solve_half(const BandedMatrix& m, const double* r, double* z, std::size_t lo,
                std::size_t hi) {
  const GridDims g = m.dims();
  const std::size_t nx = g.nx;
  const std::size_t nxy = g.plane_size();
  const double* lp = m.band(Band::kLowerPlane).data();
  const double* ll = m.band(Band::kLowerLine).data();
  const double* lq = m.band(Band::kLowerPoint).data();
  const double* dg = m.band(Band::kDiag).data();
  const double* uq = m.band(Band::kUpperPoint).data();
  const double* ul = m.band(Band::kUpperLine).data();
  const double* up = m.band(Band::kUpperPlane).data();

  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t ii = i % nx;
    const std::size_t jj = (i / nx) % g.ny;
    const std::size_t kk = i / nxy;
    double s = r[i];
    if (kk > 0 && i - nxy >= lo) s -= lp[i] * z[i - nxy];
    if (jj > 0 && i - nx >= lo) s -= ll[i] * z[i - nx];
    if (ii > 0 && i - 1 >= lo) s -= lq[i] * z[i - 1];
    z[i] = s;
  }
  for (std::size_t i = hi; i-- > lo;) {
    const std::size_t ii = i % nx;
    const std::size_t jj = (i / nx) % g.ny;
    const std::size_t kk = i / nxy;
    double s = z[i];
    if (ii + 1 < nx && i + 1 < hi) s -= uq[i] * z[i + 1];
    if (jj + 1 < g.ny && i + nx < hi) s -= ul[i] * z[i + nx];
    if (kk + 1 < g.nz && i + nxy < hi) s -= up[i] * z[i + nxy];
    z[i] = s / dg[i];
  }
}

}  // namespace

ILU0Factors build_block_ilu0(const BandedMatrix& a, int workers) {
  const std::size_t n = a.rows();
  if (n < 2) throw DimensionError("block ILU0 needs at least two rows");
  ILU0Factors f{n / 2, a};
  const std::size_t split = f.split;

  for (Band b : kAllBands) {
    const std::ptrdiff_t d = f.lu.offset(b);
    auto v = f.lu.band(b);
    for (std::size_t r = 0; r < n; ++r) {
      const auto col = static_cast<std::ptrdiff_t>(r) + d;
      const bool crosses = (r < split) != (col < static_cast<std::ptrdiff_t>(split));
      if (crosses) v[r] = 0.0;
    }
  }

  std::exception_ptr errors[2];
  const int nt = std::clamp(workers, 1, 2);
#pragma omp parallel sections num_threads(nt) if (nt > 1)
  {
#pragma omp section
    {
      try {
        factor_half(f.lu, 0, split);
      } catch (...) {
        errors[0] = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        factor_half(f.lu, split, n);
      } catch (...) {
        errors[1] = std::current_exception();
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return f;
}

void ilu0_apply(const ILU0Factors& f, std::span<const double> r, std::span<double> z,
                int workers) {
  const std::size_t n = f.rows();
  if (r.size() != n || z.size() != n) throw DimensionError("ilu0_apply: length mismatch");
  const int nt = std::clamp(workers, 1, 2);
#pragma omp parallel sections num_threads(nt) if (nt > 1)
  {
#pragma omp section
    solve_half(f.lu, r.data(), z.data(), 0, f.split);
#pragma omp section
    solve_half(f.lu, r.data(), z.data(), f.split, n);
  }
}

DenseVector ilu0_apply(const ILU0Factors& f, std::span<const double> r, int workers) {
  DenseVector z(r.size());
  ilu0_apply(f, r, z, workers);
  return z;
}

}  // namespace ntd
