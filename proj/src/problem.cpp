#include "ntd/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ntd/errors.hpp"

namespace ntd {

CoefficientKind coefficient_kind_from_int(int type) {
  switch (type) {
    case 1: return CoefficientKind::kSkyscraper;
    case 2: return CoefficientKind::kRing;
    case 3: return CoefficientKind::kPoisson;
    default: throw std::invalid_argument("matrix type must be 1, 2 or 3, got " + std::to_string(type));
  }
}

Point3 GridSpec::mesh_width() const noexcept {
  return {1.0 / static_cast<double>(dims.nx), 1.0 / static_cast<double>(dims.ny),
          1.0 / static_cast<double>(dims.nz)};
}

Point3 GridSpec::cell_center(std::size_t i, std::size_t j, std::size_t k) const noexcept {
  return {(static_cast<double>(i) + 0.5) / static_cast<double>(dims.nx),
          (static_cast<double>(j) + 0.5) / static_cast<double>(dims.ny),
          (static_cast<double>(k) + 0.5) / static_cast<double>(dims.nz)};
}

double kappa_eval(CoefficientKind kind, const Point3& p) {
  for (double c : p) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("kappa_eval: point outside (0,1)^3");
  }
  switch (kind) {
    case CoefficientKind::kSkyscraper: {
      const auto cell = [](double c) { return static_cast<long>(std::floor(10.0 * c)); };
      if (cell(p[0]) % 2 == 0 && cell(p[1]) % 2 == 0 && cell(p[2]) % 2 == 0) {
        return 1e3 * static_cast<double>(cell(p[1]) + 1);
      }
      return 1.0;
    }
    case CoefficientKind::kRing: {
      const double dx = p[0] - 0.5;
      const double dy = p[1] - 0.5;
      const double dz = p[2] - 0.5;
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      const double inner = 1.0 / (2.0 * std::sqrt(2.0));
      return (r >= inner && r <= 0.5) ? 1e3 : 1.0;
    }
    case CoefficientKind::kPoisson:
      return 1.0;
  }
  return 1.0;
}

namespace {

double face_coefficient(double ka, double kb) { return 2.0 * (ka * kb) / (ka + kb); }

}  // namespace

BandedMatrix assemble(const GridSpec& grid, CoefficientKind kind, int workers) {
  const GridDims g = grid.dims;
  BandedMatrix a(g);
  const std::size_t n = g.size();

  std::vector<double> kappa(n);
  const auto nz = static_cast<std::ptrdiff_t>(g.nz);
  const int nt = workers > 1 ? workers : 1;
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t kk = 0; kk < nz; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        kappa[g.index(i, j, k)] = kappa_eval(kind, grid.cell_center(i, j, k));
      }
    }
  }

  auto lp = a.band(Band::kLowerPlane);
  auto ll = a.band(Band::kLowerLine);
  auto lq = a.band(Band::kLowerPoint);
  auto dg = a.band(Band::kDiag);
  auto uq = a.band(Band::kUpperPoint);
  auto ul = a.band(Band::kUpperLine);
  auto up = a.band(Band::kUpperPlane);
  const std::size_t nx = g.nx;
  const std::size_t nxy = g.plane_size();

#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t kk = 0; kk < nz; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t r = g.index(i, j, k);
        const double kc = kappa[r];
        double diag = 0.0;
        // Faces in ascending-offset order; a missing neighbour is a Dirichlet face.
        const auto face = [&](bool has, std::size_t nbr, std::span<double> band) {
          if (has) {
            const double c = face_coefficient(kc, kappa[nbr]);
            band[r] = -c;
            diag += c;
          } else {
            diag += kc;
          }
        };
        face(k > 0, r - nxy, lp);
        face(j > 0, r - nx, ll);
        face(i > 0, r - 1, lq);
        face(i + 1 < g.nx, r + 1, uq);
        face(j + 1 < g.ny, r + nx, ul);
        face(k + 1 < g.nz, r + nxy, up);
        dg[r] = diag;
      }
    }
  }
  return a;
}

DenseVector make_rhs(const BandedMatrix& a, RhsMode mode) {
  DenseVector ones(a.rows(), 1.0);
  if (mode == RhsMode::kOnes) return ones;
  return spmv(a, ones);
}

}  // namespace ntd
